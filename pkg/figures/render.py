#!/usr/bin/env python3
"""Regenerate figures from recipe JSON files.

Usage::

    python3 render.py path/to/figure.recipe.json [--out image.png]

A recipe points at one or more CSV files (paths relative to the recipe),
maps named columns onto plot series, and fixes labels, scales, and
styles.  All numbers are read straight from the CSVs; nothing here
computes physics.

Recipe schema::

    {
      "figure_id": "fig2a",
      "kind": "lines" | "levels",
      "inputs": ["fig2a_populations_2J.csv"],
      "title": "...", "xlabel": "...", "ylabel": "...",
      "xscale": "linear" | "log", "yscale": "linear" | "log",
      "series": [
        {"input": 0, "x": "time", "y": "pop_A1", "label": "A1",
         "style": "-", "divide_by": "norm", "divide_power": 2, "root": 1}
      ],
      "out": "fig2a.png"
    }

``divide_by``/``divide_power`` rescale a series by another column (for
populations of a normalized state), ``root`` plots the k-th root of the
values.  ``levels`` recipes plot the columns ``<prefix>1<suffix>``,
``<prefix>2<suffix>``, ... of a single CSV row against their index (a
level diagram); they take ``prefix``/``suffix``/``row`` instead of
``series``.
"""

import argparse
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


class RecipeError(Exception):
    """Malformed recipe or inputs that do not match it."""


class MissingColumnError(RecipeError):
    def __init__(self, column, path):
        super().__init__(f"column {column!r} not found in {path}")
        self.column = column


class EmptyDataError(RecipeError):
    def __init__(self, path):
        super().__init__(f"no data rows in {path}")


def read_csv(path):
    """(header list, list of row value-lists); '#' lines are metadata."""
    lines = [
        l for l in Path(path).read_text().splitlines()
        if l.strip() and not l.startswith("#")
    ]
    if not lines:
        raise EmptyDataError(path)
    header = lines[0].split(",")
    rows = [[float(v) for v in l.split(",")] for l in lines[1:]]
    if not rows:
        raise EmptyDataError(path)
    return header, rows


def column(table, name, path):
    header, rows = table
    if name not in header:
        raise MissingColumnError(name, path)
    i = header.index(name)
    return [row[i] for row in rows]


def load_recipe(path):
    recipe = json.loads(Path(path).read_text())
    for key in ("figure_id", "inputs"):
        if key not in recipe:
            raise RecipeError(f"recipe is missing {key!r}")
    if not recipe["inputs"]:
        raise RecipeError("recipe lists no input CSVs")
    return recipe


def _series_values(series, table, path):
    ys = column(table, series["y"], path)
    if "divide_by" in series:
        denom = column(table, series["divide_by"], path)
        power = series.get("divide_power", 1)
        ys = [y / d**power for y, d in zip(ys, denom)]
    root = series.get("root", 1)
    if root != 1:
        ys = [y ** (1.0 / root) for y in ys]
    return ys


def render(recipe_path, out=None):
    recipe_path = Path(recipe_path)
    recipe = load_recipe(recipe_path)
    base = recipe_path.parent
    tables, paths = [], []
    for rel in recipe["inputs"]:
        p = base / rel
        tables.append(read_csv(p))
        paths.append(p)

    fig, ax = plt.subplots(figsize=(5.0, 3.4), dpi=150)
    if recipe.get("kind", "lines") == "levels":
        prefix = recipe.get("prefix", "E")
        suffix = recipe.get("suffix", "_re")
        header, rows = tables[0]
        row = rows[recipe.get("row", 0)]
        values = []
        while True:
            name = f"{prefix}{len(values) + 1}{suffix}"
            if name not in header:
                break
            values.append(row[header.index(name)])
        if not values:
            raise MissingColumnError(f"{prefix}1{suffix}", paths[0])
        ax.plot(range(1, len(values) + 1), sorted(values), "o", ms=3)
    else:
        for series in recipe.get("series", []):
            table = tables[series.get("input", 0)]
            path = paths[series.get("input", 0)]
            ax.plot(
                column(table, series["x"], path),
                _series_values(series, table, path),
                series.get("style", "-"),
                label=series.get("label"),
            )
        if any("label" in s for s in recipe.get("series", [])):
            ax.legend(frameon=False, fontsize=8)

    ax.set_xscale(recipe.get("xscale", "linear"))
    ax.set_yscale(recipe.get("yscale", "linear"))
    ax.set_xlabel(recipe.get("xlabel", ""))
    ax.set_ylabel(recipe.get("ylabel", ""))
    if recipe.get("title"):
        ax.set_title(recipe["title"], fontsize=10)
    fig.tight_layout()

    target = Path(out) if out else base / recipe.get(
        "out", recipe["figure_id"] + ".png"
    )
    fig.savefig(target)
    plt.close(fig)
    return target


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("recipe", help="path to a .recipe.json file")
    parser.add_argument("--out", help="override the output image path")
    args = parser.parse_args(argv)
    try:
        target = render(args.recipe, args.out)
    except (RecipeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(target)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
