"""
Building map, movement pathfinding and the radio communication graph.

Walls block movement (4-connected, unit step cost) but never radio: two agents
are radio neighbours iff their Euclidean distance is within range.
"""

import logging
import math
import re
from functools import lru_cache
from pathlib import Path
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from rapsim.core.errors import ConfigurationError, PreconditionError
from rapsim.models import Grid, Position, RadioConfig

logger = logging.getLogger(__name__)

_HEADER = re.compile(r"^\s*(\d+)\s+(\d+)\s*$")


def _require_free(grid: Grid, pos: Position) -> None:
    if not grid.contains(pos):
        raise PreconditionError(f"position ({pos.x}, {pos.y}) is outside the {grid.width}x{grid.height} map")
    if not grid.is_free(pos):
        raise PreconditionError(f"position ({pos.x}, {pos.y}) is a wall")


@lru_cache(maxsize=64)
def movement_graph(grid: Grid) -> nx.Graph:
    """4-connected graph over the free cells of ``grid``."""
    graph = nx.Graph()
    for y, row in enumerate(grid.rows):
        for x, cell in enumerate(row):
            if cell != ".":
                continue
            graph.add_node((x, y))
            if x > 0 and row[x - 1] == ".":
                graph.add_edge((x - 1, y), (x, y))
            if y > 0 and grid.rows[y - 1][x] == ".":
                graph.add_edge((x, y - 1), (x, y))
    return graph


@lru_cache(maxsize=1024)
def movement_distances_from(grid: Grid, source: Position) -> Dict[Tuple[int, int], int]:
    """Breadth-first distances from ``source`` to every reachable free cell."""
    _require_free(grid, source)
    return nx.single_source_shortest_path_length(movement_graph(grid), source.as_tuple())


def movement_distance(grid: Grid, a: Position, b: Position) -> Optional[int]:
    """Shortest 4-connected path length between two free cells, or None if unreachable."""
    _require_free(grid, a)
    _require_free(grid, b)
    return movement_distances_from(grid, a).get(b.as_tuple())


def in_radio_range(cfg: RadioConfig, a: Position, b: Position) -> bool:
    return math.hypot(a.x - b.x, a.y - b.y) <= cfg.range


def comm_graph(cfg: RadioConfig, positions: Mapping[Hashable, Position]) -> nx.Graph:
    """Unit-disk graph joining every pair of nodes within radio range."""
    graph = nx.Graph()
    graph.add_nodes_from(positions)
    nodes = list(positions.items())
    for i, (u, pu) in enumerate(nodes):
        for v, pv in nodes[i + 1:]:
            if in_radio_range(cfg, pu, pv):
                graph.add_edge(u, v)
    return graph


def hop_distance(cfg: RadioConfig, positions: Sequence[Position], a: int, b: int) -> Optional[int]:
    """Hop count between agents ``a`` and ``b`` in the unit-disk graph, or None."""
    if a == b:
        return 0
    graph = comm_graph(cfg, dict(enumerate(positions)))
    try:
        return nx.shortest_path_length(graph, a, b)
    except nx.NetworkXNoPath:
        return None


def flood_tree(graph: nx.Graph, source: Hashable) -> Tuple[Dict[Hashable, int], Dict[Hashable, Hashable]]:
    """
    Synchronous flood from ``source``.

    Returns the hop count at which each node in the source's component first
    receives the message, and the node it first received it from. When several
    neighbours deliver in the same round the smallest id wins.
    """
    hops = {source: 0}
    parents: Dict[Hashable, Hashable] = {}
    frontier = [source]
    while frontier:
        nxt = []
        for u in sorted(frontier):
            for v in sorted(graph.neighbors(u)):
                if v not in hops:
                    hops[v] = hops[u] + 1
                    parents[v] = u
                    nxt.append(v)
        frontier = nxt
    return hops, parents


def path_to(parents: Mapping[Hashable, Hashable], source: Hashable, node: Hashable) -> List[Hashable]:
    """Forward path ``source -> ... -> node`` along first-receipt parents."""
    path = [node]
    while path[-1] != source:
        path.append(parents[path[-1]])
    path.reverse()
    return path


# --- maps -----------------------------------------------------------------------

def parse_map(text: str) -> Grid:
    """Parse the plain-text map format (optional ``W H`` header, '.' free, '#' wall)."""
    lines = [line.rstrip("\r\n") for line in text.splitlines()]
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ConfigurationError("map is empty")

    header = _HEADER.match(lines[0])
    rows = lines[1:] if header else lines
    if not rows:
        raise ConfigurationError("map has a header but no rows")
    width, height = (int(header.group(1)), int(header.group(2))) if header else (len(rows[0]), len(rows))

    try:
        return Grid(width=width, height=height, rows=tuple(rows))
    except ValueError as e:
        raise ConfigurationError(f"Invalid map: {e}") from e


def load_map(path: Union[str, Path]) -> Grid:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigurationError(f"Could not read map file {path}: {e}") from e
    grid = parse_map(text)
    logger.info("Loaded %dx%d map from %s", grid.width, grid.height, path)
    return grid


def render_map(grid: Grid, header: bool = True) -> str:
    lines = [f"{grid.width} {grid.height}"] if header else []
    lines.extend(grid.rows)
    return "\n".join(lines) + "\n"


def generate_store_map(width: int, height: int, aisle_spacing: int) -> Grid:
    """
    Rectangular store with a vertical aisle wall every ``aisle_spacing`` columns.

    Each aisle wall is pierced by one gap at the middle row. A spacing of 0
    gives an empty floor.
    """
    if width < 1 or height < 1:
        raise ConfigurationError("map dimensions must be positive")
    cells = [["."] * width for _ in range(height)]
    if aisle_spacing > 0:
        gap = height // 2
        for x in range(aisle_spacing, width - 1, aisle_spacing):
            for y in range(height):
                if y != gap:
                    cells[y][x] = "#"
    return Grid(width=width, height=height, rows=tuple("".join(row) for row in cells))
