"""Scenario files: a small block-structured text format.

Grammar (see README for the full reference):

    # comment to end of line
    section_name {
        key value [value ...]
        nested_section { ... }
    }

Values are numbers or bare words; keys are unique within their section.
Sections and fields are validated against a fixed schema: unknown keys are
rejected with their line number, missing required fields name the section.
All vectors live in the Scenario dataclasses as plain tuples so that
parse(render(scenario)) == scenario holds exactly (floats are rendered with
repr, which round-trips).
"""

from dataclasses import dataclass, field, fields as dc_fields


class ScenarioError(ValueError):
    pass


# -- data model ----------------------------------------------------------------

@dataclass
class BodyConfig:
    mass: float
    position: tuple          # initial COM position, global frame
    inertia: tuple           # diagonal inertia about COM (body frame)
    dimensions: tuple        # box edge lengths
    fairleads: dict          # name -> global coordinates at the initial pose
    box_centre: tuple = (0.0, 0.0, 0.0)   # geometric centre offset from COM
    orientation: tuple = (1.0, 0.0, 0.0, 0.0)


@dataclass
class LineConfig:
    name: str
    fairlead: str            # fairlead name on the body
    anchor: tuple
    length: float
    diameter: float
    ea: float
    mass_per_length: float
    cells: int = 60
    ga: float | None = None
    ei: float | None = None
    gj: float | None = None


@dataclass
class EnvironmentConfig:
    rho_fluid: float = 1000.0
    gravity: tuple = (0.0, 0.0, -9.81)
    seabed_z: float = -1e30
    seabed_stiffness: float = 0.0
    seabed_damping: float = 0.0
    seabed_tangent_stiffness: float = 0.0
    friction_coefficient: float = 0.0
    drag_tangential: float = 0.0
    drag_normal: float = 0.0
    added_mass_tangential: float = 0.0
    added_mass_normal: float = 0.0


@dataclass
class WaveDefinition:
    height: float
    period: float
    depth: float
    ramp_periods: float = 1.0


@dataclass
class MotionDefinition:
    amplitude: tuple         # surge sway heave roll pitch yaw
    frequency: float
    phase: tuple = (0.0,) * 6
    ramp_periods: float = 0.0


@dataclass
class HydroConfig:
    damping: tuple = (0.0,) * 6
    added_mass: tuple = (0.0, 0.0, 0.0)
    added_inertia: tuple = (0.0, 0.0, 0.0)
    panels_per_edge: int = 8


@dataclass
class CouplingSettings:
    dt: float
    end_time: float
    mode: str = "coupled-hydro"
    outer_iterations: int = 3
    relaxation: float = 0.7
    newton_tol: float = 1e-6
    newton_max_iter: int = 25
    adaptive: bool = False
    dt_min: float = 1e-4
    dt_max: float = 0.05
    trim_heave: bool = True


@dataclass
class OutputConfig:
    sample_rate: float = 50.0
    track_cells: tuple = ()
    wave_gauges: tuple = ()  # x positions for incident-wave elevation channels


@dataclass
class Scenario:
    body: BodyConfig
    lines: list
    environment: EnvironmentConfig
    coupling: CouplingSettings
    waves: WaveDefinition | None = None
    motion: MotionDefinition | None = None
    hydro: HydroConfig = field(default_factory=HydroConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


# -- tokenizer / tree ----------------------------------------------------------

class _Node:
    def __init__(self, name, line):
        self.name = name
        self.line = line
        self.fields = {}     # key -> (values list, line)
        self.children = {}   # name -> _Node


def _parse_tree(text: str) -> _Node:
    root = _Node("<root>", 0)
    stack = [root]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "}":
            if len(stack) == 1:
                raise ScenarioError(f"line {lineno}: unmatched '}}'")
            stack.pop()
            continue
        if line.endswith("{"):
            name = line[:-1].strip()
            if not name or " " in name:
                raise ScenarioError(f"line {lineno}: bad section header {raw.strip()!r}")
            if name in stack[-1].children:
                raise ScenarioError(f"line {lineno}: duplicate section {name!r}")
            node = _Node(name, lineno)
            stack[-1].children[name] = node
            stack.append(node)
            continue
        parts = line.split()
        key, values = parts[0], parts[1:]
        if not values:
            raise ScenarioError(f"line {lineno}: field {key!r} has no value")
        if key in stack[-1].fields:
            raise ScenarioError(f"line {lineno}: duplicate field {key!r}")
        stack[-1].fields[key] = (values, lineno)
    if len(stack) != 1:
        raise ScenarioError(f"unclosed section {stack[-1].name!r} "
                            f"(opened at line {stack[-1].line})")
    return root


def _convert(kind, tokens, key, lineno):
    def one(tok, to):
        try:
            return to(tok)
        except ValueError:
            raise ScenarioError(
                f"line {lineno}: field {key!r}: cannot parse {tok!r}") from None

    if kind == "float":
        _expect_arity(tokens, 1, key, lineno)
        return one(tokens[0], float)
    if kind == "int":
        _expect_arity(tokens, 1, key, lineno)
        return one(tokens[0], int)
    if kind == "str":
        _expect_arity(tokens, 1, key, lineno)
        return tokens[0]
    if kind == "bool":
        _expect_arity(tokens, 1, key, lineno)
        if tokens[0] not in ("true", "false"):
            raise ScenarioError(f"line {lineno}: field {key!r}: expected true/false")
        return tokens[0] == "true"
    if kind == "vec3":
        _expect_arity(tokens, 3, key, lineno)
        return tuple(one(t, float) for t in tokens)
    if kind == "vec4":
        _expect_arity(tokens, 4, key, lineno)
        return tuple(one(t, float) for t in tokens)
    if kind == "vec6":
        _expect_arity(tokens, 6, key, lineno)
        return tuple(one(t, float) for t in tokens)
    if kind == "floats":
        return tuple(one(t, float) for t in tokens)
    if kind == "ints":
        return tuple(one(t, int) for t in tokens)
    raise AssertionError(kind)


def _expect_arity(tokens, n, key, lineno):
    if len(tokens) != n:
        raise ScenarioError(
            f"line {lineno}: field {key!r}: expected {n} value(s), got {len(tokens)}")


_REQUIRED = object()

_SCHEMAS = {
    "body": {
        "mass": ("float", _REQUIRED),
        "position": ("vec3", _REQUIRED),
        "inertia": ("vec3", _REQUIRED),
        "dimensions": ("vec3", _REQUIRED),
        "box_centre": ("vec3", (0.0, 0.0, 0.0)),
        "orientation": ("vec4", (1.0, 0.0, 0.0, 0.0)),
    },
    "line": {
        "fairlead": ("str", _REQUIRED),
        "anchor": ("vec3", _REQUIRED),
        "length": ("float", _REQUIRED),
        "diameter": ("float", _REQUIRED),
        "ea": ("float", _REQUIRED),
        "mass_per_length": ("float", _REQUIRED),
        "cells": ("int", 60),
        "ga": ("float", None),
        "ei": ("float", None),
        "gj": ("float", None),
    },
    "environment": {f.name: (
        "vec3" if f.name == "gravity" else "float", f.default)
        for f in dc_fields(EnvironmentConfig)},
    "waves": {
        "height": ("float", _REQUIRED),
        "period": ("float", _REQUIRED),
        "depth": ("float", _REQUIRED),
        "ramp_periods": ("float", 1.0),
    },
    "motion": {
        "amplitude": ("vec6", _REQUIRED),
        "frequency": ("float", _REQUIRED),
        "phase": ("vec6", (0.0,) * 6),
        "ramp_periods": ("float", 0.0),
    },
    "hydro": {
        "damping": ("vec6", (0.0,) * 6),
        "added_mass": ("vec3", (0.0, 0.0, 0.0)),
        "added_inertia": ("vec3", (0.0, 0.0, 0.0)),
        "panels_per_edge": ("int", 8),
    },
    "coupling": {
        "dt": ("float", _REQUIRED),
        "end_time": ("float", _REQUIRED),
        "mode": ("str", "coupled-hydro"),
        "outer_iterations": ("int", 3),
        "relaxation": ("float", 0.7),
        "newton_tol": ("float", 1e-6),
        "newton_max_iter": ("int", 25),
        "adaptive": ("bool", False),
        "dt_min": ("float", 1e-4),
        "dt_max": ("float", 0.05),
        "trim_heave": ("bool", True),
    },
    "output": {
        "sample_rate": ("float", 50.0),
        "track_cells": ("ints", ()),
        "wave_gauges": ("floats", ()),
    },
}


def _extract(node: _Node, schema: dict, section: str):
    out = {}
    for key, (values, lineno) in node.fields.items():
        if key not in schema:
            raise ScenarioError(
                f"line {lineno}: unknown field {key!r} in section {section!r}")
        kind, _ = schema[key]
        out[key] = _convert(kind, values, key, lineno)
    for key, (kind, default) in schema.items():
        if key not in out:
            if default is _REQUIRED:
                raise ScenarioError(
                    f"section {section!r} (line {node.line}): missing field {key!r}")
            out[key] = default
    return out


def _positive(value, name, context):
    if value is None:
        return
    if not value > 0.0:
        raise ScenarioError(f"{context}: field {name!r} must be positive, got {value}")


def parse_scenario(text: str) -> Scenario:
    """Parse and validate scenario text; raises ScenarioError with a line or
    section reference on any problem."""
    root = _parse_tree(text)
    for name in ("body", "lines", "environment", "coupling"):
        if name not in root.children:
            raise ScenarioError(f"missing section: {name}")
    for name, node in root.children.items():
        if name not in ("body", "lines", "environment", "coupling",
                        "waves", "motion", "hydro", "output"):
            raise ScenarioError(f"line {node.line}: unknown section {name!r}")
        if name != "lines" and node.children and name != "body":
            child = next(iter(node.children.values()))
            raise ScenarioError(
                f"line {child.line}: section {name!r} cannot contain subsections")

    body_node = root.children["body"]
    fairlead_node = body_node.children.pop("fairleads", None)
    if body_node.children:
        child = next(iter(body_node.children.values()))
        raise ScenarioError(f"line {child.line}: unknown section {child.name!r} in body")
    if fairlead_node is None:
        raise ScenarioError(f"section 'body' (line {body_node.line}): "
                            f"missing subsection 'fairleads'")
    fairleads = {}
    for key, (values, lineno) in fairlead_node.fields.items():
        fairleads[key] = _convert("vec3", values, key, lineno)
    if not fairleads:
        raise ScenarioError(f"line {fairlead_node.line}: no fairleads defined")

    body = BodyConfig(fairleads=fairleads, **_extract(body_node, _SCHEMAS["body"], "body"))
    _positive(body.mass, "mass", "body")
    for v in body.inertia:
        _positive(v, "inertia", "body")
    for v in body.dimensions:
        _positive(v, "dimensions", "body")

    lines_node = root.children["lines"]
    if lines_node.fields:
        key, (_, lineno) = next(iter(lines_node.fields.items()))
        raise ScenarioError(f"line {lineno}: unknown field {key!r} in section 'lines'")
    lines = []
    for name, node in lines_node.children.items():
        data = _extract(node, _SCHEMAS["line"], f"lines.{name}")
        cfg = LineConfig(name=name, **data)
        ctx = f"line {name!r} (line {node.line})"
        for fname in ("length", "diameter", "ea", "mass_per_length"):
            _positive(getattr(cfg, fname), fname, ctx)
        for fname in ("ga", "ei", "gj"):
            _positive(getattr(cfg, fname), fname, ctx)
        if cfg.cells < 1:
            raise ScenarioError(f"{ctx}: field 'cells' must be >= 1")
        if cfg.fairlead not in fairleads:
            raise ScenarioError(f"{ctx}: unknown fairlead {cfg.fairlead!r}")
        lines.append(cfg)
    if not lines:
        raise ScenarioError(f"line {lines_node.line}: no lines defined")

    env = EnvironmentConfig(**_extract(root.children["environment"],
                                       _SCHEMAS["environment"], "environment"))
    _positive(env.rho_fluid + 1e-300, "rho_fluid", "environment")
    coupling = CouplingSettings(**_extract(root.children["coupling"],
                                           _SCHEMAS["coupling"], "coupling"))
    _positive(coupling.dt, "dt", "coupling")
    if coupling.end_time < 0.0:
        raise ScenarioError("coupling: field 'end_time' must be non-negative")
    if coupling.mode not in ("coupled-hydro", "free-decay", "prescribed-motion"):
        raise ScenarioError(f"coupling: unknown mode {coupling.mode!r}")

    waves = motion = None
    if "waves" in root.children:
        waves = WaveDefinition(**_extract(root.children["waves"], _SCHEMAS["waves"], "waves"))
        _positive(waves.height + 1e-300, "height", "waves")
        _positive(waves.period, "period", "waves")
        _positive(waves.depth, "depth", "waves")
    if "motion" in root.children:
        motion = MotionDefinition(**_extract(root.children["motion"],
                                             _SCHEMAS["motion"], "motion"))
        _positive(motion.frequency, "frequency", "motion")
    if coupling.mode == "prescribed-motion" and motion is None:
        raise ScenarioError("prescribed-motion mode requires a 'motion' section")
    if coupling.mode == "coupled-hydro" and waves is None:
        raise ScenarioError("coupled-hydro mode requires a 'waves' section")

    hydro = HydroConfig(**_extract(root.children["hydro"], _SCHEMAS["hydro"], "hydro")) \
        if "hydro" in root.children else HydroConfig()
    output = OutputConfig(**_extract(root.children["output"], _SCHEMAS["output"], "output")) \
        if "output" in root.children else OutputConfig()
    _positive(output.sample_rate, "sample_rate", "output")

    return Scenario(body=body, lines=lines, environment=env, coupling=coupling,
                    waves=waves, motion=motion, hydro=hydro, output=output)


# -- rendering -----------------------------------------------------------------

def _fmt_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _render_fields(obj, schema, indent, skip=()):
    out = []
    pad = " " * indent
    for key in schema:
        if key in skip:
            continue
        v = getattr(obj, key)
        if v is None:
            continue
        if isinstance(v, tuple):
            if len(v) == 0:
                continue
            out.append(f"{pad}{key} " + " ".join(_fmt_value(x) for x in v))
        else:
            out.append(f"{pad}{key} {_fmt_value(v)}")
    return out


def render_scenario(s: Scenario) -> str:
    """Canonical text form; parse_scenario(render_scenario(s)) == s."""
    out = ["body {"]
    out += _render_fields(s.body, _SCHEMAS["body"], 2)
    out.append("  fairleads {")
    for name, coords in s.body.fairleads.items():
        out.append(f"    {name} " + " ".join(repr(float(c)) for c in coords))
    out.append("  }")
    out.append("}")
    out.append("lines {")
    for line in s.lines:
        out.append(f"  {line.name} {{")
        out += _render_fields(line, _SCHEMAS["line"], 4)
        out.append("  }")
    out.append("}")
    out.append("environment {")
    out += _render_fields(s.environment, _SCHEMAS["environment"], 2)
    out.append("}")
    if s.waves is not None:
        out.append("waves {")
        out += _render_fields(s.waves, _SCHEMAS["waves"], 2)
        out.append("}")
    if s.motion is not None:
        out.append("motion {")
        out += _render_fields(s.motion, _SCHEMAS["motion"], 2)
        out.append("}")
    out.append("hydro {")
    out += _render_fields(s.hydro, _SCHEMAS["hydro"], 2)
    out.append("}")
    out.append("coupling {")
    out += _render_fields(s.coupling, _SCHEMAS["coupling"], 2)
    out.append("}")
    out.append("output {")
    out += _render_fields(s.output, _SCHEMAS["output"], 2)
    out.append("}")
    return "\n".join(out) + "\n"
