"""Synthetic data generators: distribution mixtures and a two-population
bounded voting model, with fully reproducible streams.

Reproducibility contract: every draw is derived from the raw PCG64 uniform
stream through sampling algorithms owned by this module (inverse transforms,
Box-Muller, Marsaglia-Tsang, Bernoulli counting), so identical configs give
bit-identical output across platforms and releases. Unit j of a voting run
uses the stream PCG64(SeedSequence(seed, spawn_key=(j,))), which makes
per-unit generation order-independent and safe to parallelize.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, replace

import numpy as np

from .digits import EXCLUDE_SHORT, DatasetColumn, real_digit_frequencies
from .inference import HypothesisPrior, TestReport, report_from_counts, screen
from .laws import DigitDistribution, law_from_name

MIXTURE_FAMILIES = ("lognormal", "half-cauchy", "scaled-exponential", "uniform-range")

_MAX_REDRAW_ROUNDS = 100


@dataclass(frozen=True)
class MixtureComponent:
    """One mixture component: family name, family parameters, mixing weight."""

    family: str
    params: dict
    weight: float

    def __post_init__(self):
        if self.family not in MIXTURE_FAMILIES:
            raise ValueError(f"unknown mixture family {self.family!r}; expected one of {MIXTURE_FAMILIES}")
        if self.weight < 0.0:
            raise ValueError(f"component weight must be nonnegative, got {self.weight}")
        p = dict(self.params)
        object.__setattr__(self, "params", p)
        needed = {
            "lognormal": ("mu", "sigma"),
            "half-cauchy": ("scale",),
            "scaled-exponential": ("scale",),
            "uniform-range": ("low", "high"),
        }[self.family]
        missing = [k for k in needed if k not in p]
        if missing:
            raise ValueError(f"{self.family} component missing parameters {missing}")
        if self.family == "lognormal" and p["sigma"] < 0.0:
            raise ValueError("lognormal sigma must be nonnegative")
        if self.family in ("half-cauchy", "scaled-exponential") and p["scale"] <= 0.0:
            raise ValueError(f"{self.family} scale must be positive")
        if self.family == "uniform-range" and not p["low"] < p["high"]:
            raise ValueError("uniform-range needs low < high")


@dataclass(frozen=True)
class MixtureConfig:
    """A weighted mixture of positive-valued sampling families."""

    components: tuple
    n_samples: int
    seed: int

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("mixture needs at least one component")
        total = math.fsum(c.weight for c in comps)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"component weights sum to {total}, not 1")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        _check_seed(self.seed)


@dataclass(frozen=True)
class VotingModelConfig:
    """Two-population voting model: per unit, a partisan bloc loyal to
    candidate A plus a general bloc swinging between A and B.

    The Beta(a, b) pairs describe across-unit heterogeneity; a degenerate
    pair with b == 0 (or a == 0) pins the draw at 1 (or 0).
    """

    n_units: int
    max_voters: int
    turnout_dist: tuple[float, float]
    partisan_fraction_dist: tuple[float, float]
    partisan_loyalty: float
    swing_prob_dist: tuple[float, float]
    seed: int

    def __post_init__(self):
        if self.n_units < 1:
            raise ValueError("n_units must be at least 1")
        if self.max_voters < 10:
            raise ValueError("max_voters must be at least 10")
        if not 0.0 <= self.partisan_loyalty <= 1.0:
            raise ValueError("partisan_loyalty must lie in [0, 1]")
        for name in ("turnout_dist", "partisan_fraction_dist", "swing_prob_dist"):
            a, b = getattr(self, name)
            if a < 0.0 or b < 0.0 or a + b == 0.0:
                raise ValueError(f"{name} Beta parameters must be nonnegative with a + b > 0")
        _check_seed(self.seed)


def _check_seed(seed) -> None:
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an integer in [0, 2^64), got {seed!r}")


def _root_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _unit_rng(seed: int, unit_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(unit_index,))
    return np.random.Generator(np.random.PCG64(ss))


def _standard_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    # Box-Muller on the uniform stream; 1 - u keeps the log argument in (0, 1]
    u1 = 1.0 - rng.random(size)
    u2 = rng.random(size)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def _normal_scalar(rng: np.random.Generator) -> float:
    return float(_standard_normals(rng, 1)[0])


def _gamma_variate(rng: np.random.Generator, shape: float) -> float:
    # Marsaglia-Tsang squeeze; the shape < 1 case boosts through shape + 1
    if shape < 1.0:
        return _gamma_variate(rng, shape + 1.0) * (1.0 - rng.random()) ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = _normal_scalar(rng)
        v = (1.0 + c * x) ** 3
        if v <= 0.0:
            continue
        u = rng.random()
        if u < 1.0 - 0.0331 * x**4:
            return d * v
        if u > 0.0 and math.log(u) < 0.5 * x * x + d - d * v + d * math.log(v):
            return d * v


def _beta_variate(rng: np.random.Generator, a: float, b: float) -> float:
    if b == 0.0:
        return 1.0
    if a == 0.0:
        return 0.0
    x = _gamma_variate(rng, a)
    y = _gamma_variate(rng, b)
    return x / (x + y)


def _bernoulli_count(rng: np.random.Generator, n: int, p: float) -> int:
    # Binomial(n, p) as a count of uniforms below p; exact and stream-stable
    if n <= 0:
        return 0
    return int(np.count_nonzero(rng.random(n) < p))


def _draw_family(rng: np.random.Generator, comp: MixtureComponent, size: int) -> np.ndarray:
    p = comp.params
    if comp.family == "lognormal":
        return np.exp(p["mu"] + p["sigma"] * _standard_normals(rng, size))
    if comp.family == "half-cauchy":
        return p["scale"] * np.tan(0.5 * np.pi * rng.random(size))
    if comp.family == "scaled-exponential":
        return -p["scale"] * np.log(1.0 - rng.random(size))
    return p["low"] + rng.random(size) * (p["high"] - p["low"])


def sample_mixture(config: MixtureConfig) -> np.ndarray:
    """Draw n_samples positive reals from the weighted mixture.

    Component membership comes first from one uniform per sample, then each
    component fills its slots in declaration order; non-positive draws are
    redrawn a bounded number of rounds.
    """
    rng = _root_rng(config.seed)
    cum = np.cumsum([c.weight for c in config.components])
    cum[-1] = 1.0
    membership = np.searchsorted(cum, rng.random(config.n_samples), side="right")
    out = np.empty(config.n_samples, dtype=float)
    for j, comp in enumerate(config.components):
        slots = np.flatnonzero(membership == j)
        if slots.size == 0:
            continue
        draws = _draw_family(rng, comp, slots.size)
        for _ in range(_MAX_REDRAW_ROUNDS):
            bad = ~(draws > 0.0)
            if not bad.any():
                break
            draws[bad] = _draw_family(rng, comp, int(bad.sum()))
        else:
            raise RuntimeError(f"component {j} ({comp.family}) kept producing non-positive draws")
        out[slots] = draws
    return out


def hmpm_unit_counts(config: VotingModelConfig) -> list[tuple[int, int]]:
    """Raw per-unit (candidate A, candidate B) counts, zeros included.

    Per unit: turnout is Binomial(max_voters, t) with t ~ Beta(turnout_dist),
    the turnout splits into partisans and swing voters by a Beta draw, and
    each bloc votes for A with its own probability (loyalty, resp. a
    Beta-drawn swing probability); B receives the remainder, so counts can
    never exceed max_voters.
    """
    units = []
    for j in range(config.n_units):
        rng = _unit_rng(config.seed, j)
        t = _beta_variate(rng, *config.turnout_dist)
        phi = _beta_variate(rng, *config.partisan_fraction_dist)
        w = _beta_variate(rng, *config.swing_prob_dist)
        turnout = _bernoulli_count(rng, config.max_voters, t)
        partisans = _bernoulli_count(rng, turnout, phi)
        swing = turnout - partisans
        a = _bernoulli_count(rng, partisans, config.partisan_loyalty) + _bernoulli_count(rng, swing, w)
        units.append((a, turnout - a))
    return units


def sample_hmpm(config: VotingModelConfig) -> tuple[DatasetColumn, DatasetColumn]:
    """Generate the two per-unit count columns of the voting model.

    Zero counts (a unit where a candidate got no votes) have no significant
    digits; they are excluded from the columns and tallied instead.
    """
    units = hmpm_unit_counts(config)
    a_values = tuple(a for a, _ in units if a >= 1)
    b_values = tuple(b for _, b in units if b >= 1)
    return (
        DatasetColumn("candidate_a", a_values, excluded_count=config.n_units - len(a_values)),
        DatasetColumn("candidate_b", b_values, excluded_count=config.n_units - len(b_values)),
    )


@dataclass(frozen=True)
class LawResult:
    """Per-law outcome of an experiment: pooled screening plus the
    per-replicate p-value and posterior distributions."""

    law: str
    pooled: TestReport
    p_values: tuple
    posteriors: tuple


@dataclass(frozen=True)
class ExperimentReport:
    replicates: int
    results: tuple


def _replicate_seed(seed: int, replicate: int) -> int:
    if replicate == 0:
        return seed
    return int(np.random.SeedSequence([seed, replicate]).generate_state(1, np.uint64)[0])


def conformance_experiment(
    config: VotingModelConfig,
    laws: list[DigitDistribution],
    prior: HypothesisPrior = HypothesisPrior(),
    policy: str = EXCLUDE_SHORT,
    replicates: int = 1,
) -> ExperimentReport:
    """Run the voting model and screen its pooled counts against each law.

    Pooled means the favored candidate's per-unit counts, pooled across
    replicates (digit screenings are per candidate; mixing both candidates
    would blend two different count populations). Replicate r > 0 reseeds
    deterministically from (seed, r), so extending an experiment never
    changes earlier replicates.
    """
    if not laws:
        raise ValueError("empty law list")
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    rep_columns = []
    for r in range(replicates):
        cfg = replace(config, seed=_replicate_seed(config.seed, r))
        col_a, _ = sample_hmpm(cfg)
        rep_columns.append(replace(col_a, name=f"pooled[{r}]"))
    pooled = DatasetColumn(
        "pooled",
        tuple(v for col in rep_columns for v in col.values),
        excluded_count=sum(col.excluded_count for col in rep_columns),
    )
    results = []
    for law in laws:
        rep_reports = [screen(col, law, prior, policy) for col in rep_columns]
        results.append(
            LawResult(
                law=law.kind,
                pooled=screen(pooled, law, prior, policy),
                p_values=tuple(r.p_value for r in rep_reports),
                posteriors=tuple(r.posterior_h0 for r in rep_reports),
            )
        )
    return ExperimentReport(replicates=replicates, results=tuple(results))


def screen_mixture(
    samples,
    law: DigitDistribution,
    prior: HypothesisPrior = HypothesisPrior(),
) -> TestReport:
    """Screen the significant digits of real-valued samples against a marginal law."""
    if law.digit_index is None:
        raise ValueError("mixture screening needs a marginal digit law")
    cv = real_digit_frequencies(samples, law.digit_index)
    return report_from_counts(cv, list(samples), law, prior)


# ---------------------------------------------------------------------------
# Config files (INI): [mixture] or [voting_model], optional [experiment]


def default_voting_config(seed: int | None = None) -> VotingModelConfig:
    """The shipped default parameterization of the voting model.

    Heavy-tailed Beta shapes spread the favored candidate's counts over all
    decades up to the bound: near-full partisan units press against
    max_voters while swing-dominated units fill the lower decades.
    """
    cfg = VotingModelConfig(
        n_units=999,
        max_voters=2250,
        turnout_dist=(0.85, 0.58),
        partisan_fraction_dist=(0.46, 0.19),
        partisan_loyalty=0.99,
        swing_prob_dist=(1.05, 0.40),
        seed=12345,
    )
    return cfg if seed is None else replace(cfg, seed=seed)


@dataclass(frozen=True)
class ExperimentSpec:
    law_names: tuple
    replicates: int = 1

    def laws(self) -> list[DigitDistribution]:
        return [law_from_name(name) for name in self.law_names]


@dataclass(frozen=True)
class SimulationJob:
    """Parsed simulation config: exactly one generator, optional experiment."""

    mixture: MixtureConfig | None = None
    voting: VotingModelConfig | None = None
    experiment: ExperimentSpec | None = None

    @property
    def kind(self) -> str:
        return "mixture" if self.mixture is not None else "voting"


def _parse_beta_pair(raw: str) -> tuple[float, float]:
    parts = raw.split()
    if len(parts) != 2:
        raise ValueError(f"expected two Beta parameters 'a b', got {raw!r}")
    return float(parts[0]), float(parts[1])


def _parse_component(raw: str) -> MixtureComponent:
    parts = raw.split()
    if not parts:
        raise ValueError("empty component line")
    family, kv = parts[0], parts[1:]
    params = {}
    weight = None
    for item in kv:
        if "=" not in item:
            raise ValueError(f"component parameter {item!r} is not key=value")
        key, value = item.split("=", 1)
        if key == "weight":
            weight = float(value)
        else:
            params[key] = float(value)
    if weight is None:
        raise ValueError(f"component {raw!r} has no weight")
    return MixtureComponent(family=family, params=params, weight=weight)


def load_simulation_config(path) -> SimulationJob:
    """Parse a simulation INI file (see configs/ for annotated examples)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise ValueError(f"cannot read config file {path}")
    has_mixture = parser.has_section("mixture")
    has_voting = parser.has_section("voting_model")
    if has_mixture == has_voting:
        raise ValueError("config must have exactly one of [mixture] or [voting_model]")
    experiment = None
    if parser.has_section("experiment"):
        sec = parser["experiment"]
        names = tuple(s.strip() for s in sec["laws"].split(",") if s.strip())
        experiment = ExperimentSpec(law_names=names, replicates=sec.getint("replicates", fallback=1))
    if has_mixture:
        sec = parser["mixture"]
        comps = tuple(
            _parse_component(value) for key, value in sec.items() if key == "component" or key.startswith("component.")
        )
        mixture = MixtureConfig(components=comps, n_samples=sec.getint("n_samples"), seed=sec.getint("seed"))
        return SimulationJob(mixture=mixture, experiment=experiment)
    sec = parser["voting_model"]
    voting = VotingModelConfig(
        n_units=sec.getint("n_units"),
        max_voters=sec.getint("max_voters"),
        turnout_dist=_parse_beta_pair(sec["turnout"]),
        partisan_fraction_dist=_parse_beta_pair(sec["partisan_fraction"]),
        partisan_loyalty=sec.getfloat("partisan_loyalty"),
        swing_prob_dist=_parse_beta_pair(sec["swing_prob"]),
        seed=sec.getint("seed"),
    )
    return SimulationJob(voting=voting, experiment=experiment)
