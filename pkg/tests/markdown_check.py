"""Helpers comparing a rendered Markdown report with its terminal form."""

from markdown_it import MarkdownIt

from mllint.terminal import split_row, strip_ansi

PARSER = MarkdownIt("commonmark").enable("table")


def parse(markdown):
    return PARSER.parse(markdown)


def tables(tokens):
    """Cell texts of every table, as lists of rows."""
    out, in_cell = [], False
    for tok in tokens:
        if tok.type == "table_open":
            out.append([])
        elif tok.type == "tr_open":
            out[-1].append([])
        elif tok.type in ("th_open", "td_open"):
            in_cell = True
        elif tok.type in ("th_close", "td_close"):
            in_cell = False
        elif tok.type == "inline" and in_cell:
            out[-1][-1].append(tok.content)
    return out


def table_cells(text):
    """Cells of every table row in raw Markdown or plain terminal text, separators dropped."""
    rows = []
    for line in text.splitlines():
        if line.lstrip().startswith("|"):
            cells = split_row(line)
            if not all(set(c) <= set("-:") and c for c in cells):
                rows.append(cells)
    return rows


def visible_terminal_cells(ansi_text):
    return table_cells(strip_ansi(ansi_text))
