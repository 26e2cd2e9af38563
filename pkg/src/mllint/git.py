"""Read-only access to a project's Git repository through the ``git`` executable."""

from __future__ import annotations

import shutil
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

READ_ONLY_SUBCOMMANDS = frozenset({"rev-parse", "rev-list", "cat-file"})
GIT_TIMEOUT = 300


class GitError(Exception):
    pass


class GitUnavailable(GitError):
    """The ``git`` executable cannot be found."""


class GitCommandFailed(GitError):
    def __init__(self, args: Sequence[str], returncode: int, stderr: str):
        self.args_ = list(args)
        self.returncode = returncode
        self.stderr = stderr
        super().__init__(f"git {' '.join(args)} exited with {returncode}: {stderr.strip()}")


@dataclass(frozen=True)
class GitOutput:
    stdout: str
    stderr: str
    returncode: int


def git_executable() -> Optional[str]:
    return shutil.which("git")


def run_git(root: str | Path, args: Sequence[str], input: Optional[str] = None) -> GitOutput:
    """Run ``git -C root <args>`` and capture its output.

    Only a small set of read-only subcommands is allowed.
    """
    if not args or args[0] not in READ_ONLY_SUBCOMMANDS:
        raise ValueError(f"refusing to run non-read-only git command: {list(args)}")
    exe = git_executable()
    if exe is None:
        raise GitUnavailable("git executable not found on PATH")
    try:
        proc = subprocess.run(
            [exe, "-C", str(root), *args],
            input=input,
            capture_output=True,
            text=True,
            encoding="utf-8",
            errors="surrogateescape",
            timeout=GIT_TIMEOUT,
            check=False,
        )
    except FileNotFoundError as exc:
        raise GitUnavailable(str(exc)) from exc
    except subprocess.TimeoutExpired as exc:
        raise GitCommandFailed(args, -1, f"timed out after {GIT_TIMEOUT}s") from exc
    if proc.returncode != 0:
        raise GitCommandFailed(args, proc.returncode, proc.stderr)
    return GitOutput(proc.stdout, proc.stderr, proc.returncode)
