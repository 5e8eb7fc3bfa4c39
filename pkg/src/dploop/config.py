"""Scenario configuration: a minimal key-value tree, presets, validation.

Grammar (UTF-8 text, line oriented)::

    # comment (also after values)
    key = value            top-level scalar or comma list
    [mode]                 opens the next mode block
    k = 3.2                keys inside a mode block: k, sign, y0
    sign = -

Top-level keys: kappa (required), d, times (comma list, required
non-empty), y_range (two comma values), samples, outputs (subset of
csv, svg, report), perturb (poly index... rel; negative-control hook).
Unknown keys are rejected.  `parse_config` raises ParseError for
malformed text and ValidationError (wrapping the parameter error, with
the field path) for inadmissible physics.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import ParameterError, ParseError, ValidationError
from .fields import Perturbation
from .modes import ModeSpec, SolitonSpec

ALLOWED_OUTPUTS = ("csv", "svg", "report")
_TOP_KEYS = {"kappa", "d", "times", "y_range", "samples", "outputs", "perturb"}
_MODE_KEYS = {"k", "sign", "y0"}


@dataclass(frozen=True)
class ModeConfig:
    k: float
    sign: str  # "+" or "-"
    y0: float = 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    kappa: float
    modes: tuple[ModeConfig, ...]
    d: float = 0.0
    times: tuple[float, ...] = (0.0,)
    y_range: tuple[float, float] = (-20.0, 20.0)
    samples: int = 2000
    outputs: tuple[str, ...] = ("csv", "svg", "report")
    perturb: Perturbation | None = None

    def to_spec(self) -> SolitonSpec:
        """Validated physics parameters; raises ValidationError with field paths."""
        try:
            modes = [
                ModeSpec(k=m.k, epsilon=+1 if m.sign == "+" else -1, y0=m.y0)
                for m in self.modes
            ]
            return SolitonSpec(kappa=self.kappa, modes=modes, d=self.d)
        except ParameterError as exc:
            raise ValidationError(f"{self.name}: {exc}") from exc


def _parse_float(raw: str, where: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ParseError(f"{where}: not a number: {raw!r}") from None


def parse_config(text: str, name: str = "scenario") -> ScenarioConfig:
    """Parse and fully validate one scenario from config text."""
    top: dict[str, str] = {}
    mode_blocks: list[dict[str, str]] = []
    current: dict[str, str] | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[mode]":
            current = {}
            mode_blocks.append(current)
            continue
        if line.startswith("["):
            raise ParseError(f"line {lineno}: unknown section {line!r}")
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not value:
            raise ParseError(f"line {lineno}: empty value for {key!r}")
        target, allowed = (top, _TOP_KEYS) if current is None else (current, _MODE_KEYS)
        if key not in allowed:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        if key in target:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        target[key] = value

    if "kappa" not in top:
        raise ParseError("missing required key 'kappa'")
    if not mode_blocks:
        raise ValidationError(f"{name}: at least one [mode] block required")

    modes = []
    for i, block in enumerate(mode_blocks):
        path = f"modes[{i}]"
        if "k" not in block:
            raise ParseError(f"{path}: missing key 'k'")
        if "sign" not in block:
            raise ParseError(f"{path}: missing key 'sign'")
        if block["sign"] not in ("+", "-"):
            raise ParseError(f"{path}: sign must be '+' or '-', got {block['sign']!r}")
        modes.append(
            ModeConfig(
                k=_parse_float(block["k"], f"{path}.k"),
                sign=block["sign"],
                y0=_parse_float(block.get("y0", "0"), f"{path}.y0"),
            )
        )

    times = tuple(
        _parse_float(v, "times") for v in top.get("times", "0").split(",") if v.strip()
    )
    if not times:
        raise ValidationError(f"{name}: times must be non-empty")

    y_range_raw = [v for v in top.get("y_range", "-20, 20").split(",") if v.strip()]
    if len(y_range_raw) != 2:
        raise ParseError("y_range needs exactly two comma-separated values")
    y_range = (_parse_float(y_range_raw[0], "y_range"), _parse_float(y_range_raw[1], "y_range"))
    if not y_range[0] < y_range[1]:
        raise ValidationError(f"{name}: empty y_range {y_range}")

    try:
        samples = int(top.get("samples", "2000"))
    except ValueError:
        raise ParseError(f"samples: not an integer: {top['samples']!r}") from None
    if samples < 2:
        raise ValidationError(f"{name}: samples must be >= 2")

    outputs = tuple(
        v.strip() for v in top.get("outputs", "csv, svg, report").split(",") if v.strip()
    )
    for out in outputs:
        if out not in ALLOWED_OUTPUTS:
            raise ParseError(f"outputs: unknown kind {out!r} (choose from {ALLOWED_OUTPUTS})")

    perturb = None
    if "perturb" in top:
        perturb = _parse_perturb(top["perturb"], len(modes))

    config = ScenarioConfig(
        name=name,
        kappa=_parse_float(top["kappa"], "kappa"),
        modes=tuple(modes),
        d=_parse_float(top.get("d", "0"), "d"),
        times=times,
        y_range=y_range,
        samples=samples,
        outputs=outputs,
        perturb=perturb,
    )
    config.to_spec()  # physics validation happens here
    return config


def _parse_perturb(raw: str, n_modes: int) -> Perturbation:
    """perturb = <poly> <m_1> [... <m_N>] <rel>, e.g. 'h 1 0 1e-3'."""
    parts = raw.split()
    if len(parts) != n_modes + 2:
        raise ParseError(
            f"perturb needs '<poly> {'<m> ' * n_modes}<rel>', got {raw!r}"
        )
    target = parts[0]
    if target not in ("f_tilde", "g1", "g2", "h"):
        raise ParseError(f"perturb: unknown polynomial {target!r}")
    try:
        index = tuple(int(p) for p in parts[1:-1])
    except ValueError:
        raise ParseError(f"perturb: indices must be integers: {raw!r}") from None
    return Perturbation(target=target, index=index, rel=_parse_float(parts[-1], "perturb"))


def serialize_config(config: ScenarioConfig) -> str:
    """Round-trippable text form of a config."""
    lines = [
        f"kappa = {config.kappa!r}",
        f"d = {config.d!r}",
        "times = " + ", ".join(repr(t) for t in config.times),
        f"y_range = {config.y_range[0]!r}, {config.y_range[1]!r}",
        f"samples = {config.samples}",
        "outputs = " + ", ".join(config.outputs),
    ]
    if config.perturb is not None:
        idx = " ".join(str(i) for i in config.perturb.index)
        lines.append(f"perturb = {config.perturb.target} {idx} {config.perturb.rel!r}")
    for mode in config.modes:
        lines += ["", "[mode]", f"k = {mode.k!r}", f"sign = {mode.sign}", f"y0 = {mode.y0!r}"]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# presets: the bundled interaction scenarios
# ---------------------------------------------------------------------------
# fig1: single loop.  fig2: two-loop overtaking, amplitude exchange.
# fig3: two-loop overlap regime.  fig4: small loop circulating inside the
# large one.  fig5: loop against a smooth soliton, head-on.
# Times for fig1/fig4/fig5 (and the extra -0.5 in fig3) bracket the
# interactions; they are implementation choices, not reference values.

PRESETS: dict[str, ScenarioConfig] = {
    "fig1": ScenarioConfig(
        name="fig1",
        kappa=1.1,
        modes=(ModeConfig(k=2.1, sign="-"),),
        times=(0.0,),
    ),
    "fig2": ScenarioConfig(
        name="fig2",
        kappa=1.5,
        modes=(ModeConfig(k=3.2, sign="-"), ModeConfig(k=3.8, sign="-")),
        times=(-10.0, -0.8, 10.0),
    ),
    "fig3": ScenarioConfig(
        name="fig3",
        kappa=2.5,
        modes=(ModeConfig(k=3.4, sign="-"), ModeConfig(k=4.8, sign="-")),
        times=(-5.0, -1.0, -0.5, -0.25, 1.0, 5.0),
    ),
    "fig4": ScenarioConfig(
        name="fig4",
        kappa=3.5,
        modes=(ModeConfig(k=10.4, sign="-"), ModeConfig(k=4.2, sign="-")),
        times=(-6.0, -1.5, 0.0, 1.5, 6.0),
    ),
    "fig5": ScenarioConfig(
        name="fig5",
        kappa=0.91,
        modes=(ModeConfig(k=2.6, sign="-"), ModeConfig(k=0.91, sign="+")),
        times=(-2.0, -0.5, 0.0, 0.5, 2.0),
    ),
}


def preset(name: str) -> ScenarioConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValidationError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None


def with_perturbation(config: ScenarioConfig, perturb: Perturbation) -> ScenarioConfig:
    return replace(config, perturb=perturb)
