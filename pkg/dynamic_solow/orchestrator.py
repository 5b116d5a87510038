from __future__ import annotations

import asyncio
import itertools
import logging
from typing import Any, Callable, Dict, List, Sequence

import numpy as np

from .exceptions import MalformedValue

logger = logging.getLogger(__name__)

# Grid axes that are not model parameters
INTEGER_AXES = ("seed", "replicate")


async def run_batch(fn: Callable[[Any], Any], inputs: Sequence[Any], parallelism: int) -> List[Any]:
    """Apply ``fn`` to every input in worker threads; results (or exceptions) in input order."""
    sem = asyncio.Semaphore(max(1, parallelism))

    async def one(inp: Any):
        async with sem:
            return await asyncio.to_thread(fn, inp)

    coros = [one(i) for i in inputs]
    return await asyncio.gather(*coros, return_exceptions=True)


def run_parallel(fn: Callable[[Any], Any], inputs: Sequence[Any], parallelism: int) -> List[Any]:
    if not inputs:
        return []
    return asyncio.run(run_batch(fn, list(inputs), parallelism))


def derive_seed(master: int, index: int) -> int:
    """
    64-bit seed for grid point ``index``.

    Depends only on (master, index), so appending grid points leaves the
    streams of existing points unchanged.
    """
    state = np.random.SeedSequence(master, spawn_key=(index,)).generate_state(1, np.uint64)
    return int(state[0])


def parse_grid(specs: Sequence[str]) -> List[Dict[str, float]]:
    """
    Cartesian product of ``name=v1,v2,...`` axes, first axis outermost.

    No axes means an empty grid.
    """
    axes: list[tuple[str, list]] = []
    for spec in specs:
        if "=" not in spec:
            raise MalformedValue(f"Grid axis must look like 'name=v1,v2', got {spec!r}", key=spec)
        name, raw = (part.strip() for part in spec.split("=", 1))
        if any(name == existing for existing, _ in axes):
            raise MalformedValue(f"Grid axis '{name}' given twice", key=name)
        cast = int if name in INTEGER_AXES else float
        try:
            values = [cast(v) for v in raw.split(",") if v.strip()]
        except ValueError:
            raise MalformedValue(f"Grid axis '{name}' has a non-numeric value: {raw!r}", key=name) from None
        if not values:
            raise MalformedValue(f"Grid axis '{name}' has no values", key=name)
        axes.append((name, values))

    if not axes:
        return []
    names = [n for n, _ in axes]
    return [dict(zip(names, combo)) for combo in itertools.product(*(v for _, v in axes))]
