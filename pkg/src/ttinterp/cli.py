"""Command-line entry point: encode, refine, superres, noise, turbulence, analyze.

Every TT output ``X`` is accompanied by a text header ``X.grid`` holding the
grid descriptor plus a few provenance keys (fixture, kind).  Exit codes are
0 on success, 2 for configuration errors, 3 for capacity errors and 4 for
unreadable or malformed files.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from . import encoders as E
from . import io as tio
from . import tt as T
from .analysis import MetricReport, energy_spectrum, flatness, rank_stats, rmse_sampled, spectrum_slope
from .errors import CapacityError, ConfigError, FormatError, TTError
from .fixtures import get as get_fixture
from .kernels import by_name
from .noise import NoiseSpec, fractal_tt, midpoint_displacement_tt, perlin_tt, value_noise_tt
from .tti import apply_tti, apply_tti_interleaved, apply_tti_tucker, build_tti_1d, build_tti_multidim_interleaved
from .turbulence import CascadeSpec, turbulence_cascade


class Timer:
    """Collects wall-clock time per named stage; prints to stderr when enabled."""

    def __init__(self, enabled: bool = False):
        self.enabled = enabled
        self.stages: list[tuple[str, float]] = []

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            dt = time.perf_counter() - t0
            self.stages.append((name, dt))
            if self.enabled:
                print(f"timing stage={name} seconds={dt:.6f}", file=sys.stderr)


# --------------------------------------------------------------------------
# file helpers
# --------------------------------------------------------------------------


def header_path(path) -> Path:
    return Path(str(path) + ".grid")


def write_tt(obj, path, grid: E.GridDescriptor, **extra) -> None:
    tio.save(obj, path)
    kind = "tucker" if isinstance(obj, E.TuckerTT) else "tt"
    text = grid.to_text() + f"kind={kind}\n" + "".join(f"{k}={v}\n" for k, v in extra.items() if v is not None)
    try:
        header_path(path).write_text(text)
    except OSError as exc:
        raise FormatError(f"cannot write {header_path(path)}: {exc}") from exc


def read_tt(path):
    """Return ``(obj, grid, header_fields)``."""
    obj = tio.read(path)
    hp = header_path(path)
    if hp.exists():
        text = hp.read_text()
        grid = E.GridDescriptor.from_text(text)
        fields = tio.parse_header(text)
    else:
        if not isinstance(obj, T.TensorTrain):
            raise FormatError(f"{path} has no grid header")
        grid = E.GridDescriptor((obj.ndim,))
        fields = {}
    return obj, grid, fields


def read_pgm(path) -> np.ndarray:
    from PIL import Image

    try:
        with Image.open(path) as im:
            return np.asarray(im, dtype=float)
    except (OSError, ValueError) as exc:
        raise FormatError(f"cannot read image {path}: {exc}") from exc


def write_pgm(path, img: np.ndarray) -> None:
    from PIL import Image

    data = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    try:
        Image.fromarray(data, mode="L").save(path, format="PPM")
    except (OSError, ValueError) as exc:
        raise FormatError(f"cannot write image {path}: {exc}") from exc


def write_dense(path, arr: np.ndarray) -> None:
    """Row-major little-endian float64 blob plus a ``.hdr`` text header."""
    arr = np.ascontiguousarray(arr, dtype="<f8")
    try:
        Path(path).write_bytes(arr.tobytes())
        Path(str(path) + ".hdr").write_text(
            "dtype=float64-le\norder=row-major\nshape=" + ",".join(map(str, arr.shape)) + "\n"
        )
    except OSError as exc:
        raise FormatError(f"cannot write {path}: {exc}") from exc


def _ints(text: str | None, d: int, name: str) -> list[int]:
    if text is None:
        return [0] * d
    try:
        vals = [int(v) for v in str(text).split(",")]
    except ValueError:
        raise ConfigError(f"{name} must be comma-separated integers") from None
    if len(vals) == 1:
        vals = vals * d
    if len(vals) != d:
        raise ConfigError(f"{name} needs 1 or {d} values")
    return vals


def _separations(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",")]
    except ValueError:
        raise ConfigError("separations must be comma-separated integers") from None


def _coords(grid: E.GridDescriptor, idx: np.ndarray) -> list[np.ndarray]:
    return [a + idx[:, m] * h for m, ((a, _), h) in enumerate(zip(grid.domain, grid.spacing))]


def _emit(payload: dict, path=None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=float)
    print(text)
    if path:
        try:
            Path(path).write_text(text + "\n")
        except OSError as exc:
            raise FormatError(f"cannot write {path}: {exc}") from exc


# --------------------------------------------------------------------------
# encode
# --------------------------------------------------------------------------


def cmd_encode(args, timer: Timer) -> int:
    if (args.fixture is None) == (args.image is None):
        raise ConfigError("give exactly one of --fixture or --image")
    if args.image is not None:
        with timer.stage("read"):
            img = read_pgm(args.image)
        scales = []
        for n in img.shape:
            if n < 2 or n & (n - 1):
                raise ConfigError(f"image dimension {n} is not a power of two")
            scales.append(n.bit_length() - 1)
        layout = args.layout or ("interleaved" if len(set(scales)) == 1 else "plain")
        grid = E.GridDescriptor(tuple(scales), layout=layout)
        dense, fixture = img, None
    else:
        fx = get_fixture(args.fixture, args.width)
        scales = args.scales or fx.base_scales
        layout = args.layout or ("plain" if fx.dim == 1 else "interleaved")
        grid = E.GridDescriptor.uniform(fx.dim, scales, layout)
        T.check_capacity(grid.num_points, "fixture sampling")
        with timer.stage("sample"):
            dense = E.sample(fx.func, grid)
        fixture = fx.name
    with timer.stage("compress"):
        obj = E.encode_dense(dense, grid, args.tol)
    write_tt(obj, args.out, grid, fixture=fixture, width=args.width)
    stats = rank_stats(obj)
    if fixture is not None:
        stats["rmse"] = _fixture_rmse(obj, grid, get_fixture(fixture, args.width), 0, args.samples, args.seed)
    _emit(stats, args.report)
    return 0


def _fixture_rmse(obj, grid, fx, derivative, samples, seed) -> float:
    if derivative:
        if fx.deriv is None or grid.d != 1:
            raise ConfigError(f"fixture {fx.name} has no analytic derivative")
        ref = fx.deriv
    else:
        ref = fx.func
    return rmse_sampled(obj, lambda idx: ref(*_coords(grid, idx)), samples, seed, grid)


# --------------------------------------------------------------------------
# refine
# --------------------------------------------------------------------------


def refine_object(obj, grid: E.GridDescriptor, kernel, m: int, derivative, boundary: str, edge_mode: str, tol):
    """TTI refinement of a train or Tucker tensor by ``m`` scales per dimension."""
    d = grid.d
    ders = _ints(derivative, d, "derivative") if not isinstance(derivative, list) else derivative
    if m < 0:
        raise ConfigError("extra scales must be >= 0")
    spacing = list(grid.spacing)
    if isinstance(obj, E.TuckerTT):
        out = apply_tti_tucker(obj, kernel, m, ders, tol, boundary, spacing, edge_mode)
    elif d == 1:
        op = build_tti_1d(kernel, grid.scales[0], m, ders[0], boundary, spacing[0], edge_mode)
        out = apply_tti(op, obj, tol)
    elif grid.layout == "interleaved":
        op = build_tti_multidim_interleaved(kernel, d, grid.scales[0], m, ders, boundary, spacing, edge_mode)
        out = apply_tti_interleaved(op, obj, tol)
    else:
        raise ConfigError("multidimensional refinement needs the interleaved or tucker layout")
    return out, grid.refined(m)


def cmd_refine(args, timer: Timer) -> int:
    obj, grid, fields = read_tt(args.input)
    kernel = by_name(args.kernel)
    with timer.stage("refine"):
        out, fine = refine_object(obj, grid, kernel, args.extra, args.derivative, args.boundary,
                                  args.edge_mode, args.tol)
    if args.out:
        write_tt(out, args.out, fine, fixture=fields.get("fixture"), width=fields.get("width"))
    stats = rank_stats(out)
    name = args.fixture or fields.get("fixture")
    if name and name != "None":
        width = float(fields["width"]) if fields.get("width", "None") != "None" else None
        ders = _ints(args.derivative, grid.d, "derivative")
        with timer.stage("rmse"):
            stats["rmse"] = _fixture_rmse(out, fine, get_fixture(name, width), sum(ders), args.samples, args.seed)
    _emit(stats, args.report)
    return 0


# --------------------------------------------------------------------------
# super-resolution
# --------------------------------------------------------------------------


def superresolve(img: np.ndarray, m: int, kernel, tol=1e-12, edge_mode: str = "edge"):
    """Encode a dyadic image, refine with clamped boundaries, return ``(qtt, grid)``."""
    scales = []
    for n in img.shape:
        if n < 2 or n & (n - 1):
            raise ConfigError(f"image dimension {n} is not a power of two")
        scales.append(n.bit_length() - 1)
    if len(set(scales)) != 1:
        raise ConfigError("super-resolution needs a square image")
    grid = E.GridDescriptor(tuple(scales), layout="interleaved", periodic=(False,) * img.ndim)
    f = E.encode_dense(img, grid, tol)
    op = build_tti_multidim_interleaved(kernel, img.ndim, scales[0], m, 0, "clamped", None, edge_mode)
    return apply_tti_interleaved(op, f, tol), grid.refined(m)


def _pad_dyadic(img: np.ndarray) -> np.ndarray:
    side = 1 << max(1, (max(img.shape) - 1).bit_length())
    pads = [(0, side - n) for n in img.shape]
    return np.pad(img, pads, mode="edge")


def cmd_superres(args, timer: Timer) -> int:
    with timer.stage("read"):
        img = read_pgm(args.image)
    shape = img.shape
    dyadic = all(n >= 2 and not n & (n - 1) for n in shape) and len(set(shape)) == 1
    if not dyadic:
        if not args.pad:
            raise ConfigError(f"image shape {shape} is not square dyadic; pass --pad to edge-pad")
        img = _pad_dyadic(img)
    kernel = by_name(args.kernel)
    with timer.stage("refine"):
        out, fine = superresolve(img, args.extra, kernel, args.tol, args.edge_mode)
    stats = rank_stats(out)
    if args.tt_out:
        write_tt(out, args.tt_out, fine)
    if fine.num_points <= T.MAX_DENSE_ELEMENTS:
        with timer.stage("densify"):
            up = E.decode(out, fine)
        up = up[tuple(slice(0, n << args.extra) for n in shape)]
        if args.out:
            write_pgm(args.out, up)
        if args.dense_out:
            write_dense(args.dense_out, up)
        if args.reference:
            ref = read_pgm(args.reference)
            if ref.shape != up.shape:
                raise ConfigError(f"reference shape {ref.shape} != output shape {up.shape}")
            stats["l2_percent"] = 100.0 * float(np.linalg.norm(up - ref) / np.linalg.norm(ref))
    elif args.out or args.dense_out or args.reference:
        raise CapacityError(f"output grid of {fine.num_points} points exceeds the dense budget")
    _emit(stats, args.report)
    return 0


# --------------------------------------------------------------------------
# noise
# --------------------------------------------------------------------------

_NOISE_KEYS = {
    "seed": int, "scales": int, "base_scales": int, "octaves": int, "persistence": float,
    "roughness": float, "decay": float, "kernel": str, "fade": str, "dim": int, "rank": int,
    "layout": str, "algo": str,
}


def load_noise_config(path) -> dict:
    fields = tio.read_header(path)
    out = {}
    for k, v in fields.items():
        key = k.replace("-", "_")
        if key not in _NOISE_KEYS:
            raise ConfigError(f"unknown noise config key {k!r}")
        try:
            out[key] = _NOISE_KEYS[key](v)
        except ValueError:
            raise ConfigError(f"bad value for {k}: {v!r}") from None
    return out


def make_noise(algo: str, spec: NoiseSpec, tol=1e-12, unit_gradients=False) -> T.TensorTrain:
    if algo == "midpoint":
        return midpoint_displacement_tt(spec, tol=tol)
    if algo == "value":
        return value_noise_tt(spec, tol)
    if algo == "perlin":
        return perlin_tt(spec, unit_gradients, tol)
    if algo == "fractal":
        base = value_noise_tt(spec, tol)
        return fractal_tt(base, spec.octaves, spec.persistence, spec.dim, tol)
    raise ConfigError(f"unknown noise algorithm {algo!r}")


def _seed_path(out: Path, seed: int, many: bool) -> Path:
    if not many:
        return out
    return out.with_name(f"{out.stem}_seed{seed}{out.suffix}")


def cmd_noise(args, timer: Timer) -> int:
    cfg = load_noise_config(args.config) if args.config else {}
    for key in _NOISE_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    algo = cfg.pop("algo", None)
    if algo is None:
        raise ConfigError("--algo is required (or algo= in the config)")
    layout = cfg.pop("layout", None)
    dim = cfg.get("dim", 1)
    if layout not in (None, "interleaved", "plain") or (layout == "plain" and dim > 1):
        raise ConfigError("noise fields use the interleaved layout for dim > 1")
    first = cfg.pop("seed", 0)
    spec0 = NoiseSpec(seed=first, **cfg)
    if algo == "midpoint" and "base_scales" not in cfg:
        spec0 = replace(spec0, base_scales=1)
    grid = E.GridDescriptor.uniform(spec0.dim, spec0.scales, "interleaved" if spec0.dim > 1 else "plain")
    out = Path(args.out)
    rows = []
    many = args.seeds > 1
    for seed in range(first, first + args.seeds):
        spec = replace(spec0, seed=seed)
        with timer.stage(f"noise seed={seed}"):
            field = make_noise(algo, spec, args.tol, args.unit_gradients)
        write_tt(field, _seed_path(out, seed, many), grid, algo=algo, seed=seed)
        n = float(2 ** field.ndim)
        mean = T.total_sum(field) / n
        std = math.sqrt(max(T.norm2(field) ** 2 / n - mean**2, 0.0))
        rows.append({"seed": seed, **rank_stats(field), "mean": mean, "std": std})
    report = MetricReport("noise", {"algo": algo, "seeds": args.seeds}, {k: [r[k] for r in rows] for k in rows[0]})
    if args.csv:
        report.to_csv(args.csv)
    _emit({"algo": algo, "runs": rows})
    return 0


# --------------------------------------------------------------------------
# turbulence
# --------------------------------------------------------------------------


def _turbulence_run(job):
    seed, scales, rank, tol, layout, kmin, kmax, seps, out_dir, save = job
    spec = CascadeSpec(seed=seed, scales=scales, rank=rank, tol=tol)
    t0 = time.perf_counter()
    cas = turbulence_cascade(spec, layout)
    t_build = time.perf_counter() - t0
    vel = cas.dense()
    k, e = energy_spectrum(vel)
    slope = spectrum_slope(k, e, kmin, kmax)
    flat = flatness(vel, seps)
    if out_dir is not None:
        MetricReport("spectrum", {}, {"k": k, "E": e}).to_csv(Path(out_dir) / f"spectrum_seed{seed}.csv")
        if save:
            grid = cas.grid()
            for c, name in enumerate("xyz"):
                write_tt(cas.velocity[c], Path(out_dir) / f"v{name}_seed{seed}.tt", grid, seed=seed)
    return {"seed": seed, "slope": slope, "max_rank": cas.max_rank, "build_seconds": t_build,
            **{f"flatness_r{r}": float(f) for r, f in zip(seps, flat)}}


def default_window(scales: int) -> tuple[int, int]:
    """Fit window from the coarsest forced wavenumber to the finest cascade level.

    Tiny grids have no room for [4, 2^(M-2)], so they fall back to [1, L/2].
    """
    if scales <= 4:
        return 1, 2 ** (scales - 1)
    return 4, 2 ** (scales - 2)


def cmd_turbulence(args, timer: Timer) -> int:
    kmin, kmax = default_window(args.scales)
    kmin = args.kmin if args.kmin is not None else kmin
    kmax = args.kmax if args.kmax is not None else kmax
    seps = _separations(args.separations)
    T.check_capacity(3 * 2 ** (3 * args.scales), "dense velocity for statistics")
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [(s, args.scales, args.rank, args.tol, args.layout, kmin, kmax, seps, out_dir, args.save_fields)
            for s in range(args.seed, args.seed + args.seeds)]
    with timer.stage("ensemble"):
        if args.workers > 1:
            with ProcessPoolExecutor(args.workers) as pool:
                rows = list(pool.map(_turbulence_run, jobs))
        else:
            rows = [_turbulence_run(j) for j in jobs]
    rows.sort(key=lambda r: r["seed"])
    slopes = np.array([r["slope"] for r in rows])
    summary = {
        "scales": args.scales, "seeds": args.seeds, "window": [kmin, kmax],
        "slope_mean": float(slopes.mean()), "slope_std": float(slopes.std()),
        "max_rank": int(max(r["max_rank"] for r in rows)),
        **{f"flatness_r{r}_mean": float(np.mean([row[f"flatness_r{r}"] for row in rows])) for r in seps},
    }
    if out_dir is not None:
        MetricReport("turbulence", summary, {k: [r[k] for r in rows] for k in rows[0]}).to_csv(
            out_dir / "ensemble.csv")
        (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    _emit(summary)
    return 0


# --------------------------------------------------------------------------
# analyze
# --------------------------------------------------------------------------


def cmd_analyze(args, timer: Timer) -> int:
    payload = {}
    if args.input:
        obj, grid, fields = read_tt(args.input)
        payload.update(rank_stats(obj))
        name = args.fixture or fields.get("fixture")
        if name and name != "None":
            width = float(fields["width"]) if fields.get("width", "None") != "None" else None
            payload["rmse"] = _fixture_rmse(obj, grid, get_fixture(name, width), 0, args.samples, args.seed)
        if args.dense_out:
            write_dense(args.dense_out, E.decode(obj, grid))
    if args.velocity:
        comps = [read_tt(p) for p in args.velocity]
        vel = np.stack([E.decode(o, g) for o, g, _ in comps])
        with timer.stage("spectrum"):
            k, e = energy_spectrum(vel)
        kmin, kmax = default_window(int(round(math.log2(vel.shape[-1]))))
        payload["slope"] = spectrum_slope(k, e, args.kmin or kmin, args.kmax or kmax)
        seps = _separations(args.separations)
        payload.update({f"flatness_r{r}": float(f) for r, f in zip(seps, flatness(vel, seps))})
        if args.csv:
            MetricReport("spectrum", {}, {"k": k, "E": e}).to_csv(args.csv)
    if not payload:
        raise ConfigError("nothing to analyze: pass --input and/or --velocity")
    _emit(payload, args.report)
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ttinterp", description="Multiscale interpolation in the QTT format.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--timing", action="store_true", help="print wall-clock time per stage to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def sampling(sp):
        sp.add_argument("--samples", type=int, default=10_000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--report", help="also write the JSON summary here")

    e = sub.add_parser("encode", help="sample a fixture or image and compress it")
    e.add_argument("--fixture")
    e.add_argument("--image")
    e.add_argument("--scales", type=int)
    e.add_argument("--layout", choices=E.LAYOUTS)
    e.add_argument("--tol", type=float, default=0.0)
    e.add_argument("--width", type=float, help="mask smoothing width")
    e.add_argument("--out", required=True)
    sampling(e)
    e.set_defaults(func=cmd_encode)

    r = sub.add_parser("refine", help="refine a stored QTT to finer scales")
    r.add_argument("--input", required=True)
    r.add_argument("--kernel", default="keys")
    r.add_argument("--extra", type=int, required=True, help="number of added scales m")
    r.add_argument("--derivative", default="0", help="order, or comma list per dimension")
    r.add_argument("--boundary", choices=("periodic", "clamped"), default="periodic")
    r.add_argument("--edge-mode", choices=("zero", "edge", "reflect"), default="zero")
    r.add_argument("--tol", type=float, default=1e-12)
    r.add_argument("--fixture", help="compare against this fixture (defaults to the header's)")
    r.add_argument("--out")
    sampling(r)
    r.set_defaults(func=cmd_refine)

    s = sub.add_parser("superres", help="upscale a PGM image")
    s.add_argument("--image", required=True)
    s.add_argument("--extra", type=int, default=1)
    s.add_argument("--kernel", default="keys")
    s.add_argument("--edge-mode", choices=("zero", "edge", "reflect"), default="edge")
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--pad", action="store_true", help="edge-pad non-dyadic images instead of rejecting")
    s.add_argument("--reference", help="reference image for the l2 percentage error")
    s.add_argument("--out", help="output PGM")
    s.add_argument("--tt-out", help="also store the upscaled QTT")
    s.add_argument("--dense-out", help="float64 blob of the upscaled image")
    s.add_argument("--report")
    s.set_defaults(func=cmd_superres)

    n = sub.add_parser("noise", help="procedural noise fields")
    n.add_argument("--algo", choices=("midpoint", "value", "perlin", "fractal"))
    n.add_argument("--config", help="key=value file; flags override it")
    n.add_argument("--seed", type=int)
    n.add_argument("--seeds", type=int, default=1, help="ensemble size, seeds seed..seed+K-1")
    n.add_argument("--scales", type=int)
    n.add_argument("--base-scales", dest="base_scales", type=int)
    n.add_argument("--dim", type=int)
    n.add_argument("--octaves", type=int)
    n.add_argument("--persistence", type=float)
    n.add_argument("--roughness", type=float)
    n.add_argument("--decay", type=float)
    n.add_argument("--kernel")
    n.add_argument("--fade", choices=("f3", "f5"))
    n.add_argument("--rank", type=int)
    n.add_argument("--layout", choices=("plain", "interleaved"))
    n.add_argument("--unit-gradients", action="store_true")
    n.add_argument("--tol", type=float, default=1e-12)
    n.add_argument("--csv", help="per-seed summary table")
    n.add_argument("--out", required=True)
    n.set_defaults(func=cmd_noise)

    t = sub.add_parser("turbulence", help="synthetic turbulence ensemble with spectrum and flatness")
    t.add_argument("--scales", type=int, default=7)
    t.add_argument("--seeds", type=int, default=20)
    t.add_argument("--seed", type=int, default=0, help="first seed")
    t.add_argument("--rank", type=int, default=5)
    t.add_argument("--tol", type=float, default=1e-8)
    t.add_argument("--layout", choices=("interleaved", "tucker"), default="interleaved")
    t.add_argument("--kmin", type=float)
    t.add_argument("--kmax", type=float)
    t.add_argument("--separations", default="1,2,4,8")
    t.add_argument("--workers", type=int, default=1)
    t.add_argument("--save-fields", action="store_true")
    t.add_argument("--out-dir")
    t.set_defaults(func=cmd_turbulence)

    a = sub.add_parser("analyze", help="metrics for stored fields")
    a.add_argument("--input")
    a.add_argument("--fixture")
    a.add_argument("--velocity", nargs=3, metavar=("VX", "VY", "VZ"))
    a.add_argument("--kmin", type=float)
    a.add_argument("--kmax", type=float)
    a.add_argument("--separations", default="1,2,4,8")
    a.add_argument("--csv", help="spectrum table")
    a.add_argument("--dense-out")
    sampling(a)
    a.set_defaults(func=cmd_analyze)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    timer = Timer(args.timing)
    try:
        return args.func(args, timer)
    except TTError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except MemoryError as exc:
        print(f"error: out of memory: {exc}", file=sys.stderr)
        return CapacityError.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FormatError.exit_code


if __name__ == "__main__":
    sys.exit(main())
