"""Problem files and result serialization.

Problem files are JSON: a covariance matrix and weight vector, plus
optional per-application blocks.  Structured results go out as JSON with
+inf spelled "inf"; time series go out as CSV with 17 significant digits
so that parsing the output reproduces the floats bit-exactly.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .binary_choice import StoppingGrid
from .core import Problem
from .errors import InvalidParamError
from .news import NewsGameParams
from .simulate import SimConfig
from .stages import Stage, StagePath

_FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class ProblemFile:
    """Validated contents of an input file.

    ``sim`` stays a plain dict (seed may be absent so the CLI --seed can
    fill it in); every other block is already in its typed form."""

    problem: Problem
    binary_choice: tuple[float, StoppingGrid] | None = None
    news_game: NewsGameParams | None = None
    manipulation: dict | None = None
    sim: dict | None = None


def _require(cond: bool, msg: str):
    if not cond:
        raise InvalidParamError(msg)


def _number(block: dict, key: str, default=None):
    if key not in block:
        _require(default is not None, f"missing required field '{key}'")
        return default
    value = block[key]
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             f"field '{key}' must be a number")
    return value


def parse_problem_file(data: dict) -> ProblemFile:
    """Validate the raw JSON structure before any numerics run."""
    _require(isinstance(data, dict), "problem file must be a JSON object")
    _require("sigma" in data and "alpha" in data, "need 'sigma' and 'alpha'")
    sigma = data["sigma"]
    _require(
        isinstance(sigma, list)
        and sigma
        and all(isinstance(row, list) and len(row) == len(sigma) for row in sigma),
        "'sigma' must be a square row-major matrix",
    )
    alpha = data["alpha"]
    _require(isinstance(alpha, list) and len(alpha) == len(sigma),
             "'alpha' must match sigma's dimension")
    mu = data.get("mu")
    if mu is not None:
        _require(isinstance(mu, list) and len(mu) == len(sigma),
                 "'mu' must match sigma's dimension")
    problem = Problem(sigma, alpha, mu)

    bc = None
    if "binary_choice" in data:
        block = data["binary_choice"]
        _require(isinstance(block, dict), "'binary_choice' must be an object")
        cost = _number(block, "cost")
        _require(cost > 0, "binary choice cost must be positive")
        raw_grid = block.get("grid", {})
        _require(isinstance(raw_grid, dict), "'grid' must be an object")
        grid = StoppingGrid(
            y_cells=int(raw_grid.get("y_cells", 600)),
            y_halfwidth_sigmas=float(raw_grid.get("y_halfwidth_sigmas", 6.0)),
            jump_prob=float(raw_grid.get("jump_prob", 0.45)),
            variance_floor_frac=float(raw_grid.get("variance_floor_frac", 1e-3)),
            t_max=raw_grid.get("t_max"),
        )
        bc = (float(cost), grid)

    news = None
    if "news_game" in data:
        block = data["news_game"]
        _require(isinstance(block, dict), "'news_game' must be an object")
        news = NewsGameParams(
            sigma_omega=float(_number(block, "sigma_omega")),
            sigma_b=float(_number(block, "sigma_b", 1.0)),
            lam=float(_number(block, "lambda")),
            kappa=float(_number(block, "kappa")),
            r=float(_number(block, "r")),
        )

    manip = None
    if "manipulation" in data:
        block = data["manipulation"]
        _require(isinstance(block, dict), "'manipulation' must be an object")
        t_forced = _number(block, "T")
        _require(t_forced > 0, "manipulation duration must be positive")
        t_grid = block.get("t_grid")
        if t_grid is not None:
            _require(
                isinstance(t_grid, list) and all(isinstance(x, (int, float)) for x in t_grid),
                "'t_grid' must be a list of numbers",
            )
        manip = {"T": float(t_forced), "t_grid": t_grid}

    sim = None
    if "sim" in data:
        block = data["sim"]
        _require(isinstance(block, dict), "'sim' must be an object")
        sim = {
            "dt": float(_number(block, "dt", 0.01)),
            "horizon": float(_number(block, "horizon", 2.0)),
            "n_paths": int(_number(block, "n_paths", 1000)),
            "seed": None if "seed" not in block else int(block["seed"]),
            "mode": block.get("mode", "continuous_euler"),
        }
        # fail fast on bad values; the CLI may substitute its --seed later
        SimConfig(**{**sim, "seed": sim["seed"] or 0})

    return ProblemFile(problem=problem, binary_choice=bc, news_game=news,
                       manipulation=manip, sim=sim)


def load_problem_file(path) -> ProblemFile:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidParamError(f"invalid JSON: {exc}") from exc
    return parse_problem_file(data)


def stage_path_to_dict(path: StagePath) -> dict:
    return {
        "stages": [
            {
                "t_start": s.t_start,
                "t_end": "inf" if math.isinf(s.t_end) else s.t_end,
                "support": [i + 1 for i in s.support],
                "mixture": s.mixture.tolist(),
            }
            for s in path.stages
        ]
    }


def stage_path_from_dict(data: dict, problem: Problem) -> StagePath:
    stages = []
    for raw in data["stages"]:
        t_end = math.inf if raw["t_end"] == "inf" else float(raw["t_end"])
        stages.append(
            Stage(
                t_start=float(raw["t_start"]),
                t_end=t_end,
                support=tuple(i - 1 for i in raw["support"]),
                mixture=np.asarray(raw["mixture"], dtype=np.float64),
            )
        )
    return StagePath(tuple(stages), problem)


def dump_json(obj) -> str:
    """JSON text with non-finite floats spelled as strings."""

    def clean(x):
        if isinstance(x, dict):
            return {key: clean(val) for key, val in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        if isinstance(x, np.ndarray):
            return clean(x.tolist())
        if isinstance(x, (np.floating, float)):
            x = float(x)
            if math.isinf(x):
                return "inf" if x > 0 else "-inf"
            return x
        if isinstance(x, (np.integer,)):
            return int(x)
        if isinstance(x, (np.bool_,)):
            return bool(x)
        return x

    return json.dumps(clean(obj), indent=2)


def write_csv(fh, header: list[str], rows) -> None:
    """Locale-independent CSV with 17 significant digits per float."""
    fh.write(",".join(header) + "\n")
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (float, np.floating)):
                cells.append(_FLOAT_FMT % float(v))
            else:
                cells.append(str(v))
        fh.write(",".join(cells) + "\n")
