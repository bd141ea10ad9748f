"""Command-line scenario runner.

    gssf run --config soliton.cfg --out runs/soliton
    gssf decompose runs/opg/states/step_0200 --envelope a --out runs/opg/supermodes
    gssf heterodyne runs/scg/states/step_0300 --wavelength-nm 2090 --out runs/scg/ceo
    gssf bench --M 256 512 1024

Exit codes: 0 ok, 2 config error, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import platform
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from . import __version__, config as cfgmod, fockoracle, io, kerr0d, scenarios as sc
from .chi2 import chi2_propagate
from .chi3 import Chi3Params, chi3_propagate, soliton_grid, soliton_scales, soliton_state
from .dispersion import DispersionSpec
from .heterodyne import CombSpec, ceo_noise
from .stepper import CONSERVATION_WARN, NumericalAbort
from .supermodes import decompose

log = logging.getLogger("gssf")

EXIT_OK, EXIT_CONFIG, EXIT_ABORT = 0, 2, 3


def scenario_from_config(cfg: cfgmod.ScenarioConfig) -> sc.Chi2Scenario:
    """Map the table-style config keys onto a :class:`Chi2Scenario`."""
    p = g = r = cfg.flat()
    pump_fh = cfg.scenario == "scg"
    energy, fwhm = p["pulse_energy_pJ"], p["pulse_fwhm_fs"]
    return sc.Chi2Scenario(
        name=cfg.scenario,
        wavelength_nm=p["wavelength_nm"],
        shg_efficiency_per_W_cm2=p["shg_efficiency_per_W_cm2"],
        length_mm=p["length_mm"],
        phase_mismatch_pi_over_L=p["phase_mismatch_over_L"],
        mismatch_sign=p["mismatch_sign"],
        gvm_fs_mm=p["gvm_fs_mm"],
        gvd_fh_fs2_mm=p["gvd_fh_fs2_mm"],
        gvd_sh_fs2_mm=p["gvd_sh_fs2_mm"],
        tod_fh_fs3_mm=p["tod_fh_fs3_mm"],
        tod_sh_fs3_mm=p["tod_sh_fs3_mm"],
        fh_energy_pJ=energy if pump_fh else 0.0,
        fh_fwhm_fs=fwhm if pump_fh else 0.0,
        sh_energy_pJ=0.0 if pump_fh else energy,
        sh_fwhm_fs=0.0 if pump_fh else fwhm,
        fh_loss_db_m=p["fh_loss_db_m"],
        fh_loss_high_db_m=p["fh_loss_high_db_m"],
        loss_cutoff_nm=p["loss_cutoff_nm"],
        loss_ramp_nm=p["loss_ramp_nm"],
        sh_loss_db_m=p["sh_loss_db_m"],
        loss=p["loss"],
        M=g["M"],
        window_ps=g["window_ps"],
        steps=r["steps"],
        mode=r["mode"],
    )


def _checkpoints(steps, n, every):
    if every:
        return tuple(range(0, steps + 1, every))
    return tuple(np.linspace(0, steps, max(n, 1) + 1).round().astype(int))


def _try_decompose(state, envelope=None):
    """Supermodes of a state, or None (with a warning) when the state is not physical."""
    try:
        return decompose(state, envelope)
    except ValueError as exc:
        warnings.warn(f"supermodes skipped: {exc}", RuntimeWarning, stacklevel=2)
        return None


def _write_supermodes(out: Path, tag: str, dec):
    io.write_csv(out / f"supermodes_{tag}.csv",
                 {"index": np.arange(dec.N), "squeeze_db": dec.squeeze_db,
                  "antisqueeze_db": dec.antisqueeze_db, "n_th": dec.n_th})
    io.write_arrays(out / f"waveforms_{tag}", {"waveforms": dec.waveforms()},
                    {"rows": "supermode index (sorted by antisqueezing)",
                     "columns": "analysis modes (bins, FFT-free bin order)"})


# --- scenarios ---------------------------------------------------------------------------


def run_kerr(cfg, out: Path, opts) -> dict:
    p = cfg.flat()
    g = p["g"]
    params = kerr0d.KerrParams(g=g, kappa=p["kappa_over_g"] * g, alpha0=p["alpha0"])
    t_final = p["t_final"] / g
    residuals = {}
    for model in kerr0d.MODELS:
        tr = kerr0d.evolve(model, params, t_final, p["steps"], p["samples"] or None)
        major, minor = tr.quadrature_variances()
        io.write_csv(out / f"kerr_{model}.csv",
                     {"gt": g * tr.t, "mean": tr.mean, "n_bar": tr.photon_number,
                      "var_major": major, "var_minor": minor})
        if params.kappa == 0:
            n = tr.photon_number
            residuals[f"{model}_photon_drift"] = float(np.max(np.abs(n - n[0])) / n[0])
    D = p["fock_D"]
    if D:
        t = np.linspace(0, t_final, (p["samples"] or 100) + 1)
        ref = fockoracle.kerr_master_evolve(p["alpha0"], g, params.kappa, D, t)
        major, minor = ref.quadrature_variances()
        io.write_csv(out / "kerr_fock.csv",
                     {"gt": g * t, "mean": ref.mean, "n_bar": ref.photon_number,
                      "var_major": major, "var_minor": minor})
    return {"residuals": residuals, "lossless": params.kappa == 0}


def run_soliton(cfg, out: Path, opts) -> dict:
    p = r = cfg.flat()
    n_bar, gnl, gvd = p["n_bar"], p["g"], p["gvd"]
    t_n, z_n = soliton_scales(n_bar, gnl, gvd)
    grid = soliton_grid(n_bar, p["M"], p["window"], gnl, gvd)
    state = soliton_state(grid, n_bar, gnl, gvd)
    steps = r["steps"]
    params = Chi3Params(gnl, DispersionSpec.polynomial(grid, gvd=gvd), p["t_final"] * t_n, steps, r["model"],
                        r["scheme"], r["backend"])
    cps = _checkpoints(steps, r["checkpoints"], opts.checkpoint_every)
    traj = chi3_propagate(state, params, cps, label="soliton")
    for i, (t, st) in zip(cps, zip(traj.times, traj.states)):
        tag = f"step_{i:04d}"
        io.save_state(out / "states" / tag, st, {"t": t, "t_over_t_n": t / t_n, "z_n": z_n})
        io.write_csv(out / f"mean_{tag}.csv",
                     {"z_over_z_n": grid.physical_order(grid.z) / z_n,
                      "mean": grid.physical_order(st.mu)})
        dec = _try_decompose(st) if p["supermodes"] and i > 0 else None
        if dec is not None:
            _write_supermodes(out, tag, dec)
    return {"residuals": {"photon_drift": traj.max_invariant_drift()},
            "lossless": r["model"] == "gssf", "final": traj.final,
            "scales": {"t_n": t_n, "z_n": z_n}}


def run_chi2(cfg, out: Path, opts) -> dict:
    v = cfg.flat()
    scn = scenario_from_config(cfg)
    grid, state, params = scn.build()
    params.scheme, params.backend = v["scheme"], v["backend"]
    cps = _checkpoints(params.steps, v["checkpoints"], opts.checkpoint_every)
    e0 = sc.sh_energy(scn, state)
    traj = chi2_propagate(state, params, cps, label=scn.name)
    summary = {}
    for i, (z, st) in zip(cps, zip(traj.times, traj.states)):
        tag = f"step_{i:04d}"
        io.save_state(out / "states" / tag, st, {"z_m": z, "scenario": scn.as_dict()})
        sp = sc.spectra(scn, st)
        io.write_csv(out / f"spectra_{tag}.csv",
                     {"f_fh_hz": sp.f_a, "esd_fh_J_per_Hz": sp.esd_a, "f_sh_hz": sp.f_b,
                      "esd_sh_J_per_Hz": sp.esd_b, "fluor_fh_J_per_Hz": sp.fluor_a})
        summary[tag] = {"z_mm": z / sc.MM, "sh_energy_pJ": sc.sh_energy(scn, st) * 1e12,
                        "pump_depletion_pJ": (e0 - sc.sh_energy(scn, st)) * 1e12}
    final = traj.final
    dec = _try_decompose(final, "a") if v["supermodes"] else None
    if dec is not None:
        _write_supermodes(out, f"step_{cps[-1]:04d}_fh", dec)
        summary["supermodes_fh"] = {"antisqueeze_db": dec.antisqueeze_db[:8].tolist(),
                                    "squeeze_db": dec.squeeze_db[:8].tolist()}
    if cfg.scenario == "scg":
        comb = CombSpec.for_grid(grid.window, scn.carrier_fh, v["phi_ceo"])
        rep = ceo_noise(final.to_k(), comb)
        _write_heterodyne(out / "heterodyne", rep)
        summary["heterodyne"] = {"total_signal": rep.total_signal,
                                 "total_variance": rep.total_variance}
    return {"residuals": {"manley_rowe_drift": traj.max_invariant_drift()},
            "lossless": params.lossless, "summary": summary, "final": final}


def _write_heterodyne(out: Path, rep):
    io.write_csv(out / "ceo_lines.csv",
                 {"f_hz": rep.freq, "S": rep.S, "S2": rep.S**2, "N_shot": rep.N_shot,
                  "N_para": rep.N_para})
    io.write_arrays(out / "N1_plus_N2", {"N1_plus_N2": rep.correlation_map, "m": rep.m},
                    {"rows": "FH line index m", "per": "pulse", **rep.meta,
                     "total_signal": rep.total_signal, "total_variance": rep.total_variance})


RUNNERS = {"kerr": run_kerr, "soliton": run_soliton, "opg": run_chi2, "scg": run_chi2}


def _final_diff(a, b) -> float:
    """Largest relative difference over all arrays of two final states."""
    worst = 0.0
    names = [n for n in vars(a) if isinstance(getattr(a, n), np.ndarray)]
    for n in names:
        x, y = getattr(a, n), getattr(b, n)
        scale = max(np.max(np.abs(y)), 1e-300)
        worst = max(worst, float(np.max(np.abs(x - y)) / scale))
    return worst


@contextlib.contextmanager
def _threads(n):
    if not n:
        yield
        return
    import numba

    prev = numba.get_num_threads()
    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    try:
        with sfft.set_workers(n):
            yield
    finally:
        numba.set_num_threads(prev)


def cmd_run(args) -> int:
    try:
        cfg = cfgmod.load(args.config)
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or cfg.get("out") or f"runs/{cfg.scenario}")
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"scenario": cfg.scenario, "config": cfg.flat(), "config_path": cfg.source,
                "code_version": __version__, "python": platform.python_version(),
                "numpy": np.__version__, "threads": args.threads, "status": "running"}
    runner = RUNNERS[cfg.scenario]
    t0 = time.perf_counter()
    try:
        with _threads(args.threads), warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            res = runner(cfg, out, args)
            manifest["warnings"] = [str(w.message) for w in caught]
            if args.convergence_check or cfg.get("convergence_check"):
                fine = cfg.with_(steps=2 * cfg.get("steps"), supermodes=False)
                res2 = runner(fine, out / "convergence", args)
                if "final" in res:
                    manifest["convergence"] = {"steps": [cfg.get("steps"), 2 * cfg.get("steps")],
                                               "max_rel_diff": _final_diff(res["final"],
                                                                           res2["final"])}
    except NumericalAbort as exc:
        manifest.update(status="aborted", error=str(exc),
                        wall_time_s=time.perf_counter() - t0)
        if exc.last_good is not None:
            t, st = exc.last_good
            io.save_state(out / "states" / "last_good", st, {"t": t})
            manifest["last_good_t"] = t
        io.write_manifest(out / "manifest.json", manifest)
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    manifest["wall_time_s"] = time.perf_counter() - t0
    manifest["residuals"] = res["residuals"]
    flagged = res.get("lossless") and any(v > CONSERVATION_WARN for v in res["residuals"].values())
    manifest["conservation"] = "WARN" if flagged else "ok"
    for key in ("summary", "scales"):
        if key in res:
            manifest[key] = res[key]
    manifest["status"] = "ok"
    io.write_manifest(out / "manifest.json", manifest)
    log.info("%s done in %.1f s -> %s", cfg.scenario, manifest["wall_time_s"], out)
    return EXIT_OK


def cmd_decompose(args) -> int:
    state = io.load_state(args.state)
    env = None if args.envelope == "both" or not hasattr(state, "mu_a") else args.envelope
    try:
        dec = decompose(state, env, args.domain)
    except ValueError as exc:
        print(f"cannot decompose: {exc}", file=sys.stderr)
        return EXIT_ABORT
    out = Path(args.out)
    _write_supermodes(out, args.tag, dec)
    print(f"{dec.N} supermodes; top antisqueezing {dec.antisqueeze_db[:3].round(2).tolist()} dB")
    return EXIT_OK


def cmd_heterodyne(args) -> int:
    state = io.load_state(args.state)
    if not hasattr(state, "mu_a"):
        print("heterodyne needs a two-envelope state", file=sys.stderr)
        return EXIT_CONFIG
    comb = CombSpec.for_grid(state.grid.window, sc.constants.c / (args.wavelength_nm * 1e-9),
                             args.phi_ceo)
    rep = ceo_noise(state.to_k(), comb)
    _write_heterodyne(Path(args.out), rep)
    print(f"signal {rep.total_signal:.6g}  variance {rep.total_variance:.6g} (per pulse)")
    return EXIT_OK


def cmd_oracle(args) -> int:
    fo = fockoracle
    out = Path(args.out)
    if args.which == "kerr":
        g, kappa, alpha0 = 1.0, 1.5, np.sqrt(20.0)
        t = np.linspace(0, 0.1, 51)
        tr = fo.kerr_master_evolve(alpha0, g, kappa, args.D, t)
        major, minor = tr.quadrature_variances()
        io.write_csv(out / "oracle_kerr.csv", {"gt": g * t, "mean": tr.mean,
                                                "n_bar": tr.photon_number,
                                                "var_major": major, "var_minor": minor})
    else:
        t = np.linspace(0, 1.0, 21)
        moms, _ = fo.chi2_single_bin_evolve(1.0, 1.5, 0.3, args.D, args.D, t)
        io.write_csv(out / "oracle_chi2.csv",
                     {"t": t, **{k: np.array([getattr(m, k) for m in moms])
                                 for k in ("mu_a", "mu_b", "Cp_aa", "Cm_aa", "Cp_bb", "Cm_bb",
                                           "Cp_ab", "Cm_ab")}})
    return EXIT_OK


def bench(M_list, steps=3, kind="chi2") -> list:
    """Per-step wall time of a full two-envelope (or chi3) step at each M."""
    rows = []
    for M in M_list:
        if kind == "chi3":
            grid = soliton_grid(1000.0, M)
            st = soliton_state(grid, 1000.0)
            t_n, _ = soliton_scales(1000.0, -1.0, 1.0)
            disp, h = DispersionSpec.polynomial(grid, gvd=1.0), t_n / 200
            chi3_propagate(st, Chi3Params(-1.0, disp, h, 1))
            t0 = time.perf_counter()
            chi3_propagate(st, Chi3Params(-1.0, disp, h * (steps + 1), steps + 1))
        else:
            scn = sc.SCG.with_(M=M, window_ps=2.0 * M / 1024)
            grid, st, params = scn.build()
            warm = scn.params(grid, 1)
            warm.length = params.length / params.steps
            chi2_propagate(st, warm)
            params.steps = steps + 1
            params.length = warm.length * params.steps
            t0 = time.perf_counter()
            chi2_propagate(st, params)
        dt = (time.perf_counter() - t0) / (steps + 1)
        rows.append((M, dt))
        log.info("bench %s M=%d: %.4f s/step", kind, M, dt)
    return rows


def cmd_bench(args) -> int:
    rows = bench(args.M, args.steps, args.kind)
    print("M,seconds_per_step,ratio_to_previous")
    prev = None
    for M, dt in rows:
        print(f"{M},{dt:.6f},{'' if prev is None else f'{dt / prev:.3f}'}")
        prev = dt
    if len(rows) > 1:
        Ms, ts = np.log([r[0] for r in rows]), np.log([r[1] for r in rows])
        print(f"# fitted exponent {np.polyfit(Ms, ts, 1)[0]:.3f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gssf", description=__doc__.split("\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True, metavar="{run,decompose,heterodyne,bench}")

    r = sub.add_parser("run", help="run a scenario config (kerr, soliton, opg, scg)")
    r.add_argument("--config", required=True)
    r.add_argument("--out")
    r.add_argument("--convergence-check", action="store_true",
                   help="rerun at twice the steps and record the final-state difference")
    r.add_argument("--threads", type=int, default=0)
    r.add_argument("--checkpoint-every", type=int, default=0, metavar="K")
    r.set_defaults(func=cmd_run)

    d = sub.add_parser("decompose", help="supermode table of a saved state")
    d.add_argument("state")
    d.add_argument("--envelope", choices=("a", "b", "both"), default="a")
    d.add_argument("--domain", choices=("z", "k"), default="z")
    d.add_argument("--tag", default="state")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_decompose)

    h = sub.add_parser("heterodyne", help="f-2f CEO signal and noise of a saved state")
    h.add_argument("state")
    h.add_argument("--wavelength-nm", type=float, required=True)
    h.add_argument("--phi-ceo", type=float, default=np.pi / 3)
    h.add_argument("--out", required=True)
    h.set_defaults(func=cmd_heterodyne)

    b = sub.add_parser("bench", help="per-step timing versus M")
    b.add_argument("--M", type=int, nargs="+", default=[256, 512, 1024])
    b.add_argument("--steps", type=int, default=3)
    b.add_argument("--kind", choices=("chi2", "chi3"), default="chi2")
    b.set_defaults(func=cmd_bench)

    o = sub.add_parser("oracle", help=argparse.SUPPRESS)
    o.add_argument("which", choices=("kerr", "chi2"))
    o.add_argument("--D", type=int, default=40)
    o.add_argument("--out", required=True)
    o.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
