"""``kron3d`` command-line experiment harness. Every command writes one CSV."""
import argparse
import csv
import io
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import analysis, codebook
from . import correlation as corr
from .channel import ArrayGeometry, ChannelParams
from .linalg import LinalgError, psd_sqrt

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    def __init__(self, flag, msg):
        super().__init__(f"{flag}: {msg}")
        self.flag = flag


def parse_angle(text):
    """Radians from ``1.2``, ``0.25pi``, ``3/8pi`` or ``pi``."""
    s = str(text).strip().lower()
    if s.endswith("pi"):
        coef = s[:-2].rstrip("*") or "1"
        return float(Fraction(coef)) * np.pi
    return float(s)


def _angle(text):
    try:
        return parse_angle(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid angle {text!r}")


@dataclass
class ExperimentConfig:
    m_elev: int = 4
    n_az: int = 4
    d1: float = 0.5
    d2: float = 0.5
    phi: float = np.pi / 3
    theta: float = 3 * np.pi / 8
    sigma: float = np.pi / 6
    xi: float = np.pi / 12
    paths: int = 20
    snr_db: list = field(default_factory=lambda: [10.0])
    trials: int = 1000
    seed: int = 0
    n1: int = 8
    n2: int = 8
    out: str = "out.csv"
    workers: int = 1

    def validate(self):
        for flag, v in (("--m-elev", self.m_elev), ("--n-az", self.n_az), ("--paths", self.paths),
                        ("--trials", self.trials), ("--n1", self.n1), ("--n2", self.n2),
                        ("--workers", self.workers)):
            if v < 1:
                raise ConfigError(flag, f"must be >= 1, got {v}")
        for flag, v in (("--d1", self.d1), ("--d2", self.d2)):
            if not (np.isfinite(v) and v > 0):
                raise ConfigError(flag, f"must be finite and positive, got {v}")
        if not (0 < self.theta < np.pi):
            raise ConfigError("--theta", f"must lie strictly between 0 and pi, got {self.theta}")
        if not np.isfinite(self.phi):
            raise ConfigError("--phi", "must be finite")
        for flag, v in (("--sigma", self.sigma), ("--xi", self.xi)):
            if not (np.isfinite(v) and v >= 0):
                raise ConfigError(flag, f"must be finite and nonnegative, got {v}")
        for v in self.snr_db:
            if not np.isfinite(v):
                raise ConfigError("--snr-db", f"must be finite, got {v}")
        _check_writable(self.out)
        return self

    @property
    def geometry(self):
        return ArrayGeometry(self.m_elev, self.n_az, self.d1, self.d2)

    @property
    def params(self):
        return ChannelParams(self.phi, self.theta, self.sigma, self.xi, self.paths)


def _check_writable(path, flag="--out"):
    d = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(d):
        raise ConfigError(flag, f"directory {d} does not exist")
    if not os.access(d, os.W_OK):
        raise ConfigError(flag, f"directory {d} is not writable")
    if os.path.isdir(path):
        raise ConfigError(flag, f"{path} is a directory")


def fmt(x):
    return f"{x:.12g}"


def write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".kron3d-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows):
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(header)
    for row in rows:
        out.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    write_atomic(path, buf.getvalue())


def cmd_eig_compare(cfg):
    g, p = cfg.geometry, cfg.params
    cmp = analysis.compare_spectra(corr.full_correlation(g, p), corr.kronecker_correlation(g, p))
    rows = [(i, float(a), float(b), cmp.max_rel_gap)
            for i, (a, b) in enumerate(zip(cmp.eig_full, cmp.eig_kron))]
    write_csv(cfg.out, ["index", "eig_full", "eig_kron", "max_rel_gap"], rows)
    print(f"max_rel_gap={cmp.max_rel_gap:.6g} trace_full={cmp.eig_full.sum():.6f} "
          f"trace_kron={cmp.eig_kron.sum():.6f}")


def cmd_capacity(cfg):
    g, p = cfg.geometry, cfg.params
    sqrts = analysis.correlation_sqrts(g, p)
    rows = []
    summary = []
    for snr in cfg.snr_db:
        caps = {}
        for scheme in analysis.Scheme:
            samples = analysis.capacity_cdf(scheme, g, p, snr, cfg.trials, cfg.seed,
                                            workers=cfg.workers, sqrts=sqrts)
            caps[scheme] = [s.capacity for s in samples]
            rows.extend((s.scheme.value, s.snr_db, s.capacity) for s in samples)
        ks = analysis.ks_distance(caps[analysis.Scheme.FULL], caps[analysis.Scheme.KRON])
        summary.append(f"snr_db={snr:g} " + " ".join(
            f"mean_{k.value}={np.mean(v):.6f}" for k, v in caps.items()) + f" ks_full_kron={ks:.6f}")
    write_csv(cfg.out, ["scheme", "snr_db", "capacity"], rows)
    print("\n".join(summary))


def cmd_beam_loss(cfg, points=analysis.SWEEP_POINTS):
    rows = analysis.loss_sweep(cfg.geometry, cfg.params, points)
    write_csv(cfg.out, ["varied_param", "value", "loss_db"], rows)
    print(f"default_loss_db={rows[0][2]:.6g} max_loss_db={max(r[2] for r in rows):.6g}")


FEEDBACK_ARMS = ("unlimited_full", "unlimited_kron", "kron_optimal", "joint", "product")


def feedback_experiment(cfg, restarts=20, iterations=2000):
    """All five feedback arms on shared channels ``h = R^{1/2} w``.

    Returns CSV rows ``(trial, arm, index_az, index_el, gain, loss_db)``;
    arms without codebook indices report -1.
    """
    g, p = cfg.geometry, cfg.params
    s_full, s_kron = analysis.correlation_sqrts(g, p)
    h, g_full, g_kron = analysis.unlimited_feedback_gains(s_full, s_kron, cfg.seed, cfg.trials,
                                                          cfg.workers)
    base_az, _ = codebook.pack_lines(g.n_az, cfg.n1, (cfg.seed, 1), restarts, iterations)
    base_el, _ = codebook.pack_lines(g.m_elev, cfg.n2, (cfg.seed, 2), restarts, iterations)
    base_j, _ = codebook.pack_lines(g.size, cfg.n1 * cfg.n2, (cfg.seed, 3), restarts, iterations)
    f_az = codebook.rotate_codebook(base_az, psd_sqrt(corr.azimuth_correlation(g, p)))
    f_el = codebook.rotate_codebook(base_el, psd_sqrt(corr.elevation_correlation(g, p)))
    f_j = codebook.rotate_codebook(base_j, s_full)
    rows = []
    for t in range(cfg.trials):
        ht = h[t]
        energy = float(g_full[t])
        prod = codebook.product_select(ht, f_az, f_el)
        joint = codebook.joint_select(ht, f_j)
        kopt = codebook.kron_optimal_gain(ht, g.n_az, g.m_elev)
        for arm, ia, ie, gain in (("unlimited_full", -1, -1, energy),
                                  ("unlimited_kron", -1, -1, float(g_kron[t])),
                                  ("kron_optimal", -1, -1, kopt),
                                  ("joint", joint.index, -1, joint.gain),
                                  ("product", prod.index_az, prod.index_el, prod.gain)):
            rows.append((t, arm, ia, ie, gain, float(10 * np.log10(energy / gain))))
    return rows


def summarize_feedback(rows):
    stats = {}
    for arm in FEEDBACK_ARMS:
        sel = [r for r in rows if r[1] == arm]
        stats[arm] = (float(np.mean([r[4] for r in sel])), float(np.mean([r[5] for r in sel])))
    return stats


def cmd_feedback(cfg, restarts=20, iterations=2000):
    rows = feedback_experiment(cfg, restarts, iterations)
    write_csv(cfg.out, ["trial", "arm", "index_az", "index_el", "gain", "loss_db"], rows)
    stats = summarize_feedback(rows)
    print(" ".join(f"{a}: mean_gain={g:.6f} mean_loss_db={l:.6f}" for a, (g, l) in stats.items()))
    print(f"product_minus_joint_db={stats['product'][1] - stats['joint'][1]:.6f}")


def cmd_pack(dim, size, seed, out, restarts=20, iterations=2000):
    book, q = codebook.pack_lines(dim, size, seed, restarts, iterations)
    buf = io.StringIO()
    codebook.save_codebook(buf, book)
    write_atomic(out, buf.getvalue())
    print(f"min_chordal_distance={q.min_chordal_distance:.6f} rankin_bound={q.rankin_bound:.6f}")
    return book, q


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_CONFIG, f"kron3d: error: {message}\n")


def _add_experiment_flags(sp, out):
    sp.add_argument("--m-elev", type=int, default=4)
    sp.add_argument("--n-az", type=int, default=4)
    sp.add_argument("--d1", type=float, default=0.5)
    sp.add_argument("--d2", type=float, default=0.5)
    sp.add_argument("--phi", type=_angle, default=np.pi / 3)
    sp.add_argument("--theta", type=_angle, default=3 * np.pi / 8)
    sp.add_argument("--sigma", type=_angle, default=np.pi / 6)
    sp.add_argument("--xi", type=_angle, default=np.pi / 12)
    sp.add_argument("--paths", type=int, default=20)
    sp.add_argument("--snr-db", type=float, nargs="+", default=[10.0])
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n1", type=int, default=8)
    sp.add_argument("--n2", type=int, default=8)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", default=out)


def build_parser():
    parser = _Parser(prog="kron3d", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, out in (("eig-compare", "eig_compare.csv"), ("capacity", "capacity.csv"),
                      ("beam-loss", "beam_loss.csv"), ("feedback", "feedback.csv")):
        sp = sub.add_parser(name)
        _add_experiment_flags(sp, out)
        if name == "beam-loss":
            sp.add_argument("--points", type=int, default=analysis.SWEEP_POINTS)
        if name == "feedback":
            sp.add_argument("--restarts", type=int, default=20)
            sp.add_argument("--iterations", type=int, default=2000)
    sp = sub.add_parser("pack")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--size", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--iterations", type=int, default=2000)
    sp.add_argument("--out", default="codebook.txt")
    return parser


def _config(ns):
    keys = ExperimentConfig.__dataclass_fields__
    return ExperimentConfig(**{k: getattr(ns, k) for k in keys}).validate()


def run(argv=None):
    ns = build_parser().parse_args(argv)
    for flag in ("restarts", "iterations", "points", "dim", "size"):
        if getattr(ns, flag, 1) < 1:
            raise ConfigError(f"--{flag}", f"must be >= 1, got {getattr(ns, flag)}")
    if ns.command == "pack":
        _check_writable(ns.out)
        cmd_pack(ns.dim, ns.size, ns.seed, ns.out, ns.restarts, ns.iterations)
        return
    cfg = _config(ns)
    if ns.command == "eig-compare":
        cmd_eig_compare(cfg)
    elif ns.command == "capacity":
        cmd_capacity(cfg)
    elif ns.command == "beam-loss":
        cmd_beam_loss(cfg, ns.points)
    elif ns.command == "feedback":
        cmd_feedback(cfg, ns.restarts, ns.iterations)


def main(argv=None):
    try:
        run(argv)
    except ConfigError as exc:
        print(f"kron3d: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LinalgError as exc:
        print(f"kron3d: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
