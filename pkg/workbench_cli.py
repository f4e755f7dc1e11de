#!/usr/bin/env python3
"""
================================================================
🧰 FRACTAL TANGENT WORKBENCH - Command line front door
carpet / param / tangent / universal experiments and the
verify-all acceptance run, all driven by one validated config
================================================================

Usage:
    python workbench_cli.py carpet build --n 6 --depth 3 --seed 42 --out cells.json
    python workbench_cli.py carpet render --in cells.json --out carpet.svg
    python workbench_cli.py param eval --n 6 --depth 4 --t 13/64
    python workbench_cli.py tangent cutcount --n 6 --k 2
    python workbench_cli.py tangent blowup --config blowup_plant_config.json --out report.json
    python workbench_cli.py universal verify --target cross --levels 2,3,4 --radius 2
    python workbench_cli.py verify-all --n 4 --seed 7
"""

import argparse
import itertools
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from carpet import (
    ahlfors_ratio, approx_cells, code_point, middle_letters, verify_model_constraints,
)
from check_report import CheckRecord, CheckReport, dumps, write_json
from dendrite_param import (
    ParametrizationBuilder, check_overlap_degeneracy, check_properties, eval_F,
    holder_constant, surjectivity_check,
)
from setops import EXCESS_AXIOMS, CellSet, PointCloud, as_fraction, excess_axiom_failures
from svg_render import render_cells, render_curve, render_segments
from symbolic import (
    Alphabet, ChoiceFunction, ConstantChoice, Occurrence, PlantSpec, plant_R1R2, sample_choice,
)
from tangent_lab import (
    Sponge, ball_cover, blowup_pipeline, count_local_cut_points, cut_point_formula,
    limit_model, line_blowup_check, observed_offsets, sponge_face_intersection,
)
from universal_curve import (
    approximate, assemble_H, named_target, recovery_cascade, verify_recovery,
)
from workbench_config import ExperimentConfig, build_config, read_json_file, setup_logging
from workbench_errors import IO_EXIT_CODE, ConfigError, DomainError, PreconditionError, WorkbenchError

logger = logging.getLogger(__name__)


def _ints(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _rationals(text: str) -> List[str]:
    values = [v.strip() for v in text.split(",") if v.strip()]
    for v in values:
        try:
            Fraction(v)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{v!r} is not a rational number")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Randomized carpet and tangent workbench')
    parser.add_argument('--config', type=str, default=None, help='JSON experiment file')
    parser.add_argument('--n', type=int, default=None, help='Carpet base (even, >= 4)')
    parser.add_argument('--seed', type=int, default=None, help='Seed of the random choice function')
    parser.add_argument('--budget-cells', type=int, default=None, help='Enumeration budget')
    parser.add_argument('--out-dir', type=str, default=None, help='Directory for outputs')
    parser.add_argument('--log-level', type=str, default=None, help='DEBUG, INFO, WARNING, ...')
    sub = parser.add_subparsers(dest='kind', required=True)

    carpet = sub.add_parser('carpet', help='Build, render and check carpet approximations')
    carpet.add_argument('action', choices=['build', 'render', 'check'])
    carpet.add_argument('--depth', type=int, default=None)
    carpet.add_argument('--in', dest='in_file', type=str, default=None, help='Cell set JSON')
    carpet.add_argument('--out', type=str, default=None)

    param = sub.add_parser('param', help='Dendrite parametrization F')
    param.add_argument('action', choices=['eval', 'curve', 'families', 'holder'])
    param.add_argument('--depth', type=int, default=None, help='Stage m')
    param.add_argument('--t', type=str, default="1/2", help='Parameter in [0,1], e.g. 13/64')
    param.add_argument('--samples', type=int, default=4096)
    param.add_argument('--pairs', type=int, default=20000)
    param.add_argument('--out', type=str, default=None)

    tangent = sub.add_parser('tangent', help='Cut points, blow-ups and limit models')
    tangent.add_argument('action', choices=['cutcount', 'blowup', 'render-model'])
    tangent.add_argument('--k', type=int, default=1)
    tangent.add_argument('--radii', type=_rationals, default=["1", "2"])
    tangent.add_argument('--window', type=str, default="2")
    tangent.add_argument('--spec', dest='plant_file', type=str, default=None, help='Plant JSON')
    tangent.add_argument('--out', type=str, default=None)

    universal = sub.add_parser('universal', help='Grid graph approximations and the curve H')
    universal.add_argument('action', choices=['approx', 'verify'])
    universal.add_argument('--target', type=str, default='line')
    universal.add_argument('--dim', type=int, default=2)
    universal.add_argument('--j', type=int, default=2)
    universal.add_argument('--levels', type=_ints, default=[2, 3, 4])
    universal.add_argument('--radius', type=str, default="2")
    universal.add_argument('--out', type=str, default=None)

    sub.add_parser('verify-all', help='Run every acceptance check and write report.json')
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    options = {k: v for k, v in vars(args).items()
               if k not in ('config', 'n', 'seed', 'budget_cells', 'out_dir', 'log_level',
                            'kind', 'depth', 'plant_file') and v is not None}
    cli_values = {
        'kind': args.kind,
        'n': args.n,
        'seed': args.seed,
        'budget_cells': args.budget_cells,
        'out_dir': args.out_dir,
        'log_level': args.log_level,
        'depth': getattr(args, 'depth', None),
        'plant_file': getattr(args, 'plant_file', None),
    }
    config = build_config(args.config, cli_values)
    try:
        return ExperimentConfig.model_validate({**config.model_dump(), "options": {**config.options, **options}})
    except ValidationError as e:
        raise ConfigError(f"invalid command line options: {e.errors(include_url=False)}")


# ----------------------------------------------------------------------
# Helpers
# ----------------------------------------------------------------------

def _out_path(config: ExperimentConfig, default_name: str) -> Path:
    explicit = config.options.get('out')
    if explicit:
        path = Path(explicit)
        return path if path.is_absolute() or path.parent != Path('.') else Path(config.out_dir) / path
    return Path(config.out_dir) / default_name


def _choice(config: ExperimentConfig) -> ChoiceFunction:
    alphabet = Alphabet(config.n)
    if config.plant is not None:
        spec = PlantSpec(tuple(config.plant.w_prefix),
                         tuple(Occurrence(o.ell, o.N, o.k) for o in config.plant.occurrences))
        return plant_R1R2(alphabet, config.plant.base_seed, spec)
    return sample_choice(alphabet, config.seed)


def _banner(title: str, config: ExperimentConfig):
    logger.info("=" * 60)
    logger.info(title)
    logger.info("=" * 60)
    logger.info(f"n={config.n} seed={config.seed} depth={config.depth} budget={config.budget_cells:,}")
    logger.info("=" * 60)


def planted_family(n: int, N: int, k: int, seed: int, tail: int = 4):
    """Constant middle-letter word with one planted occurrence at ℓ = N + 1"""
    letter = middle_letters(n)[0]
    ell = N + 1
    prefix = (letter,) * (ell + 2 * N + k + tail)
    spec = PlantSpec(prefix, (Occurrence(ell, N, k),))
    return plant_R1R2(Alphabet(n), seed, spec), spec


# ----------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------

def cmd_carpet(config: ExperimentConfig) -> int:
    action = config.options['action']
    if action == 'check':
        results = verify_model_constraints(config.n)
        write_json(_out_path(config, f"constraints_n{config.n}.json"), [r.to_dict() for r in results])
        return 0 if all(r.ok for r in results) else 1
    if action == 'build':
        approx = approx_cells(_choice(config), config.n, config.depth, config.budget_cells)
        write_json(_out_path(config, "cells.json"), approx.cells.to_dict())
        return 0
    if 'in_file' not in config.options:
        raise DomainError("carpet render needs --in")
    cells = CellSet.from_dict(read_json_file(config.options['in_file']))
    render_cells(cells, _out_path(config, "carpet.svg"))
    return 0


def cmd_param(config: ExperimentConfig) -> int:
    action = config.options['action']
    eta = _choice(config)
    if action == 'eval':
        point, error = eval_F(eta, config.n, config.depth, as_fraction(config.options.get('t', '1/2')))
        sys.stdout.write(dumps({"t": config.options.get('t'), "point": [str(c) for c in point],
                                "error_radius": error}))
        return 0
    if action == 'holder':
        report = holder_constant(eta, config.n, config.depth, int(config.options.get('pairs', 20000)),
                                 config.seed)
        write_json(_out_path(config, "holder.json"), report.to_dict())
        return 0 if report.ok else 1
    param = ParametrizationBuilder(eta, config.n, config.budget_cells).build(config.depth)
    if action == 'families':
        write_json(_out_path(config, "families.json"),
                   {str(m): param.families_dict(m) for m in range(param.depth + 1)})
        return 0
    samples = int(config.options.get('samples', 4096))
    pts = np.array([[float(c) for c in param.F(Fraction(i, samples - 1))] for i in range(samples)])
    cells = approx_cells(eta, config.n, config.depth, config.budget_cells).cells
    render_curve(pts, _out_path(config, "curve.svg"), cells)
    return 0


def default_block(n: int, N: int):
    return (middle_letters(n)[0],) * N


def cmd_tangent(config: ExperimentConfig) -> int:
    action = config.options['action']
    k = int(config.options.get('k', 1))
    if action == 'cutcount':
        sys.stdout.write(f"{count_local_cut_points(config.n, k, config.budget_cells)}\n")
        return 0
    if action == 'render-model':
        window = as_fraction(config.options.get('window', '2'))
        N = max(2, math.ceil(math.log(float(window) + 2, config.n)) + 1)
        offsets = observed_offsets(config.n, N, default_block(config.n, N), window)
        model = limit_model(config.n, k, window, offsets, budget=config.budget_cells)
        render_cells(model.cells, _out_path(config, f"L{k}.svg"), model.cut_points)
        return 0 if model.ok else 1
    if config.plant is None:
        raise PreconditionError("tangent blowup needs a plant (--spec or plant in --config)")
    eta = _choice(config)
    radii = config.options.get('radii', ["1", "2"])
    reports = []
    for occ in config.plant.occurrences:
        reports.append(blowup_pipeline(eta, config.n, config.plant.w_prefix, occ.k, occ.N, occ.ell,
                                       radii, budget=config.budget_cells))
    write_json(_out_path(config, "blowup_report.json"), [r.to_dict() for r in reports])
    return 0 if all(r.ok for r in reports) else 1


def cmd_universal(config: ExperimentConfig) -> int:
    action = config.options['action']
    target = named_target(config.options.get('target', 'line'), int(config.options.get('dim', 2)))
    if action == 'approx':
        j = int(config.options.get('j', 2))
        approx = approximate(target, j, config.budget_cells)
        out = _out_path(config, f"x{j}.json")
        write_json(out, approx.to_dict())
        if target.dimension == 2 and approx.edges.shape[0]:
            pts = approx.vertices.astype(np.float64) / 2 ** j
            render_segments(pts[approx.edges], out.with_suffix(".svg"))
        return 0 if approx.boundary_check().ok else 1
    levels = list(config.options.get('levels', [2, 3, 4]))
    radius = as_fraction(config.options.get('radius', '2'))
    cascade, positions = recovery_cascade(target, levels, config.budget_cells)
    curve = assemble_H(cascade, len(cascade))
    reports = [verify_recovery(target, cascade, positions[j], j, radius, curve=curve) for j in levels]
    write_json(_out_path(config, "universal_report.json"), {
        "target": target.to_dict(),
        "cascade": cascade.to_dict(),
        "H": curve.to_dict(),
        "recovery": [r.to_dict() for r in reports],
    })
    if target.dimension == 2:
        render_segments(curve.segments_float(), _out_path(config, "H.svg"))
    return 0 if all(r.passed is not False for r in reports) else 1


# ----------------------------------------------------------------------
# verify-all
# ----------------------------------------------------------------------

class AcceptanceRun:
    """Every acceptance check at the scale set by config.options"""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.n = config.n
        self.seed = config.seed
        self.budget = config.budget_cells
        self.opt = config.options
        self.rng = np.random.default_rng(config.seed)
        self.report = CheckReport("verify-all", {"n": self.n, "seed": self.seed,
                                                 "options": dict(sorted(self.opt.items()))})

    def option(self, key: str, default: Any) -> Any:
        return self.opt.get(key, default)

    def check_cut_points(self) -> CheckRecord:
        rows = {}
        for n in self.option("cut_n", [4, 6]):
            for k in range(int(self.option("cut_k_max", 3)) + 1):
                rows[f"{n},{k}"] = (count_local_cut_points(n, k, self.budget), cut_point_formula(n, k))
        bad = {key: v for key, v in rows.items() if v[0] != v[1]}
        return self.report.add("cut-point formula", "local cut points of K^{n,k}",
                               {k: v[0] for k, v in rows.items()}, {k: v[1] for k, v in rows.items()},
                               not bad)

    def check_constraints(self) -> CheckRecord:
        failing = [f"n={n} {r.name}" for n in self.option("constraint_n", [4, 6, 8])
                   for r in verify_model_constraints(n) if not r.ok]
        return self.report.add("model constraints", "OSC and layout constraints C1-C7",
                               failing, [], not failing)

    def _cloud(self, size: int) -> PointCloud:
        den = int(self.rng.integers(1, 6))
        pts = self.rng.integers(-12, 13, size=(size, 2))
        return PointCloud(pts.astype(np.int64), den)

    def _shift(self) -> Tuple[Fraction, Fraction]:
        den = int(self.rng.integers(1, 8))
        return tuple(Fraction(int(v), den) for v in self.rng.integers(-24, 25, size=2))

    def check_excess_axioms(self) -> CheckRecord:
        count = int(self.option("excess_triples", 1000))
        failures = {name: 0 for name in EXCESS_AXIOMS}
        for i in range(count):
            A, B, C = (self._cloud(int(self.rng.integers(1, 8))) for _ in range(3))
            if i % 2:
                # half the triples have A ⊆ B so containment sees both sides
                rows = self.rng.choice(len(B), size=int(self.rng.integers(1, len(B) + 1)), replace=False)
                A = PointCloud(B.numerators[np.sort(rows)], B.denominator)
            for name in excess_axiom_failures(A, B, C, self._shift()):
                failures[name] += 1
        return self.report.add("excess axioms",
                               "translation invariance, triangle inequality, containment, "
                               "monotonicity, subadditivity",
                               failures, {name: 0 for name in EXCESS_AXIOMS},
                               not any(failures.values()), triples=count)

    def check_ahlfors(self) -> CheckRecord:
        depth = int(self.option("ahlfors_depth", 5))
        eta = sample_choice(Alphabet(self.n), self.seed)
        approx = approx_cells(eta, self.n, depth, self.budget)
        alphabet = Alphabet(self.n)
        worst_low, worst_high, bad = math.inf, 0.0, 0
        for _ in range(int(self.option("ahlfors_samples", 200))):
            word = tuple(int(v) for v in self.rng.integers(1, alphabet.size + 1, size=depth))
            x = code_point(eta, self.n, word).point
            r = Fraction(int(self.rng.integers(1, 1000)), 1000 * self.n)
            r = max(r, Fraction(1, self.n ** (depth - 1)))
            sample = ahlfors_ratio(eta, self.n, x, r, depth, approx)
            worst_low = min(worst_low, sample.ratio * sample.slack / sample.lower)
            worst_high = max(worst_high, sample.ratio / (sample.upper * sample.slack))
            bad += not sample.within_bounds
        return self.report.add("Ahlfors regularity", "μ(B(x,r)) comparable to r^α",
                               {"min ratio·slack/lower": worst_low, "max ratio/(upper·slack)": worst_high},
                               {"min ratio·slack/lower": 1, "max ratio/(upper·slack)": 1}, bad == 0, depth=depth)

    def check_holder(self) -> CheckRecord:
        n = int(self.option("holder_n", 6))
        eta = sample_choice(Alphabet(n), self.seed)
        report = holder_constant(eta, n, int(self.option("holder_stage", 4)),
                                 int(self.option("holder_pairs", 100000)), self.seed)
        return self.report.add("Hölder constant", "|F(x)-F(y)| <= √2 n³ |x-y|^{1/α}",
                               report.constant, report.bound, report.ok, stage=report.stage,
                               pairs=report.pairs)

    def check_parametrization(self) -> List[CheckRecord]:
        m_max = int(self.option("param_stage", 3))
        seeds = [self.seed + i for i in range(int(self.option("param_seeds", 5)))]
        violations, surj_missing, overlaps = [], 0, 0
        for s in seeds:
            eta = sample_choice(Alphabet(self.n), s)
            param = ParametrizationBuilder(eta, self.n, self.budget).build(m_max + 1)
            for m in range(m_max + 1):
                violations += [f"seed {s} stage {m}: {v.prop} {v.message}" for v in check_properties(param, m)]
                overlaps += check_overlap_degeneracy(param, m).shared_cells
            surj = surjectivity_check(param, approx_cells(eta, self.n, m_max + 1, self.budget))
            surj_missing += len(surj.missing)
        return [
            self.report.add("P-properties", "nested tour families P1-P7", violations, [], not violations,
                            stages=m_max, seeds=seeds),
            self.report.add("surjectivity", "F meets every stage cell", surj_missing, 0, surj_missing == 0),
            self.report.add("overlap degeneracy", "E and N pieces own disjoint cells", overlaps, 0,
                            overlaps == 0),
        ]

    def check_blowups(self) -> List[CheckRecord]:
        records = []
        for N, k in self.option("blowup_pairs", [[3, 0], [3, 1], [4, 1]]):
            eta, spec = planted_family(self.n, N, k, self.seed)
            occ = spec.occurrences[0]
            report = blowup_pipeline(eta, self.n, spec.w_prefix, k, N, occ.ell, (1, 2), extra_depth=0,
                                     budget=self.budget)
            records.append(self.report.add(
                f"blow-up bounds N={N} k={k}", "|y_N - x_N| <= n^{-N-k+3}, window <= n^{-N-k+4}",
                {"gap": float(report.gap), "window": float(report.window_distance)},
                {"gap": float(report.gap_bound), "window": float(report.window_bound)},
                report.ok, margin=report.checks["margin"]))
        return records

    def check_aw_profile(self) -> CheckRecord:
        k = int(self.option("aw_k", 1))
        Ns = list(self.option("aw_N", [2, 3, 4]))
        radii = (1, 2)
        values: Dict[int, List[float]] = {r: [] for r in radii}
        finals_ok = True
        for N in Ns:
            eta, spec = planted_family(self.n, N, k, self.seed)
            report = blowup_pipeline(eta, self.n, spec.w_prefix, k, N, spec.occurrences[0].ell, radii,
                                     extra_depth=0, budget=self.budget)
            for r in radii:
                values[r].append(report.final_excess(r))
            finals_ok &= all(report.final_excess(r) <= float(report.window_bound)
                             + math.sqrt(2) * self.n ** (2 - N - k) for r in radii)
        monotone = all(all(b <= a for a, b in zip(v, v[1:])) for v in values.values())
        return self.report.add("AW profile", "exc(X_N, Y_N) does not grow with N",
                               {str(r): v for r, v in values.items()}, "non-increasing",
                               monotone and finals_ok, N=Ns, k=k)

    def check_limit_models(self) -> CheckRecord:
        window = Fraction(2)
        counts = {}
        ok = True
        for k in range(1, int(self.option("limit_k_max", 2)) + 1):
            N = 3
            offsets = observed_offsets(self.n, N, default_block(self.n, N), window)
            model = limit_model(self.n, k, window, offsets, budget=self.budget)
            counts[k] = len(model.cut_points)
            ok &= model.ok
        return self.report.add("limit models", "L_k cut points lie in the K^{n,k} square",
                               counts, {k: cut_point_formula(self.n, k) for k in counts}, ok)

    def check_sponges(self) -> CheckRecord:
        mismatches = 0
        checked = 0
        for n in self.option("sponge_n", [4, 6]):
            sponge = Sponge.from_model(n, 2)
            count = len(sponge.translations)
            for size in (2, 3):
                for idx in itertools.combinations(range(1, count + 1), size):
                    checked += 1
                    maps = [sponge.map(i) for i in idx]
                    lo = [max(m.translation[c] for m in maps) for c in range(2)]
                    hi = [min(m.translation[c] + m.scale for m in maps) for c in range(2)]
                    face = sponge_face_intersection(sponge, idx)
                    if face is None:
                        mismatches += all(lo[c] <= hi[c] for c in range(2))
                        continue
                    t, s = maps[0].translation, maps[0].scale
                    image = {'[0,1]': lambda c: (t[c], t[c] + s), '0': lambda c: (t[c], t[c]),
                             '1': lambda c: (t[c] + s, t[c] + s)}
                    mismatches += any(image[f](c) != (lo[c], hi[c]) for c, f in enumerate(face.factors))
        return self.report.add("sponge faces", "cell intersections are images of faces", mismatches, 0,
                               mismatches == 0, intersections=checked)

    def check_ball_covers(self) -> CheckRecord:
        eta = ConstantChoice(2)
        alphabet = Alphabet(self.n)
        bad, worst = 0, 0.0
        for _ in range(int(self.option("cover_samples", 50))):
            word = tuple(int(v) for v in self.rng.integers(1, alphabet.size + 1, size=4))
            x = code_point(eta, self.n, word).point
            r = Fraction(int(self.rng.integers(1, 64)), 64 * self.n)
            cover = ball_cover(eta, self.n, x, r, 4, self.budget)
            bad += not cover.ok
            worst = max(worst, cover.card / cover.card_bound)
        return self.report.add("ball covers", "stopping-word covers of balls", worst, 1.0, bad == 0)

    def check_line_blowups(self) -> CheckRecord:
        report = line_blowup_check()
        return self.report.add("line blow-ups", "smooth curves blow up to lines", report.worst,
                               report.bound, report.ok)

    def check_universal(self) -> List[CheckRecord]:
        records = []
        levels = list(self.option("universal_levels", [2, 3, 4]))
        radius = Fraction(2)
        for name in self.option("universal_targets", ["line", "cross"]):
            target = named_target(name)
            boundary = {j: approximate(target, j, self.budget).boundary_check().ok for j in levels}
            cascade, positions = recovery_cascade(target, levels, self.budget)
            curve = assemble_H(cascade, len(cascade))
            recs = [verify_recovery(target, cascade, positions[j], j, radius, curve=curve) for j in levels]
            records.append(self.report.add(
                f"universal curve {name}", "ρ_j H recovers the target",
                {str(r.j): [r.forward, r.backward] for r in recs}, {str(r.j): r.bound for r in recs},
                all(boundary.values()) and all(r.passed is not False for r in recs),
                boundary=boundary, H_length=str(curve.length)))
        return records

    def run(self) -> CheckReport:
        checks = [
            ("cut-point formula", self.check_cut_points),
            ("model constraints", self.check_constraints),
            ("excess axioms", self.check_excess_axioms),
            ("Ahlfors regularity", self.check_ahlfors),
            ("Hölder constant", self.check_holder),
            ("parametrization", self.check_parametrization),
            ("blow-up bounds", self.check_blowups),
            ("AW profile", self.check_aw_profile),
            ("limit models", self.check_limit_models),
            ("sponge faces", self.check_sponges),
            ("ball covers", self.check_ball_covers),
            ("line blow-ups", self.check_line_blowups),
            ("universal curve", self.check_universal),
        ]
        skip = set(self.option("skip", []))
        for name, check in checks:
            if name in skip:
                logger.info(f"⚠️ skipping {name}")
                continue
            self.report.run(name, name, lambda check=check: _last(check()))
        return self.report


def _last(result: Any) -> CheckRecord:
    return result[-1] if isinstance(result, list) else result


def cmd_verify_all(config: ExperimentConfig) -> int:
    report = AcceptanceRun(config).run()
    report.save(_out_path(config, "report.json"))
    report.log_summary()
    return 0 if report.passed else 1


COMMANDS = {
    'carpet': cmd_carpet,
    'param': cmd_param,
    'tangent': cmd_tangent,
    'universal': cmd_universal,
    'verify-all': cmd_verify_all,
}


def run(config: ExperimentConfig) -> int:
    """Dispatch a validated config; returns the exit code"""
    _banner(f"🚀 {config.kind.upper()}", config)
    return COMMANDS[config.kind](config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or "INFO")
    try:
        config = config_from_args(args)
        setup_logging(config.log_level)
        return run(config)
    except WorkbenchError as e:
        logger.error(f"❌ {type(e).__name__}: {e.message}")
        return e.exit_code
    except OSError as e:
        logger.error(f"❌ I/O failure: {e}")
        return IO_EXIT_CODE


if __name__ == "__main__":
    sys.exit(main())
