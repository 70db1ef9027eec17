"""Batch command-line front end.

A job is one JSON document, read from ``--config <path>`` or standard input::

    {
      "command": "analyze",
      "kernel": {"kind": "fbm", "alpha": 0.75},
      "quadrature": {"scheme": "gl", "n": 1024},
      "params": {},
      "seed": 0
    }

Commands and their ``params``:

``spectrum``
    writes ``spectrum.csv`` (``i,mu,sqrt_mu``) and ``spectrum.json``.
``analyze``
    writes ``verdict.json``; exits with 2 when the decision is INCONCLUSIVE.
``power-kernel``
    ``beta`` (0.5), ``N``; writes ``power_kernel.json``.
``sample``
    ``N``, ``count`` (10), ``beta`` (0.5); writes ``paths/sample_<j>.csv`` and
    ``norm_stats.json``.
``dominance``
    ``kernel2``, ``grid_sizes`` ([64, 128, 256, 512]), ``ridge`` (1e-10);
    writes ``dominance.json``.
``rank-diff``
    ``kernel2``, ``n`` (64), ``tol`` (1e-8); writes ``rank.json``.
``tensor``
    ``d`` (2), ``budget`` (64), with ``kernel`` the one-dimensional factor;
    writes ``tensor.json``.
``reproduce``
    ``only`` (list of fixture names); writes ``reproduce.json``; exits with 1
    on any mismatch.

Every run writes ``manifest.json`` with the resolved config, its SHA-256,
package versions, seeds and output hashes. Passing a manifest back through
``--config`` reruns the same job. Failures write ``error.json`` and exit 1.
"""

import argparse
import hashlib
import json
import os
import platform
import sys

import numpy as np
import scipy

from . import __version__
from .analysis import (INCONCLUSIVE, dominance_trace, estimate_decay, finite_rank_difference,
                       rkhs_path_verdict, tensor_verdict)
from .domain import INTERVAL
from .errors import PathRKHSError, SchemaError
from .quadrature import default_rule, gauss_legendre, rule_from_json, uniform_midpoint
from .reproduce import reproduce_paper_table
from .sampling import PRNG, kl_sample, norm_stats
from .spectral import decompose, power_kernel
from .specs import dumps, kernel_from_json

COMMANDS = ("spectrum", "analyze", "power-kernel", "sample", "dominance", "rank-diff",
            "tensor", "reproduce")
U64 = 2**64


def _canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def load_config(text):
    """Parse a job document; a manifest is unwrapped to the config it records."""
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config is not valid JSON: {exc}", operation="load_config") from exc
    if not isinstance(config, dict):
        raise SchemaError("config must be a JSON object", operation="load_config")
    if "config_sha256" in config and isinstance(config.get("config"), dict):
        config = config["config"]
    return config


def resolve(config, command=None, seed=None):
    """Apply command-line overrides and fill defaults."""
    config = dict(config)
    if command is not None:
        config["command"] = command
    if seed is not None:
        config["seed"] = seed
    config.setdefault("seed", 0)
    config.setdefault("params", {})
    cmd = config.get("command")
    if cmd not in COMMANDS:
        raise SchemaError(f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}",
                          operation="resolve")
    s = config["seed"]
    if isinstance(s, bool) or not isinstance(s, int) or not 0 <= s < U64:
        raise SchemaError(f"seed must be an unsigned 64-bit integer, got {s!r}", operation="resolve")
    if not isinstance(config["params"], dict):
        raise SchemaError("params must be an object", operation="resolve")
    if cmd != "reproduce" and "kernel" not in config:
        raise SchemaError(f"command {cmd} needs a 'kernel'", operation="resolve")
    unknown = set(config) - {"command", "kernel", "quadrature", "params", "seed"}
    if unknown:
        raise SchemaError(f"unknown config fields {sorted(unknown)}", operation="resolve")
    return config


def _rule(config, kernel):
    spec = config.get("quadrature")
    if spec is None:
        return None
    return rule_from_json(spec, kernel.domain)


def _decomposition(config, kernel):
    rule = _rule(config, kernel)
    return decompose(kernel, default_rule(kernel.domain) if rule is None else rule)


def _verdict_json(verdict):
    out = verdict.to_json()
    if "tensor_spectrum" in verdict.extras:
        out["tensor_spectrum"] = verdict.extras["tensor_spectrum"]
    return out


def _run_spectrum(config, kernel, params):
    decomp = _decomposition(config, kernel)
    info = {"kernel": kernel.spec, "quadrature": decomp.rule.to_json(), "method": decomp.method,
            "n_nodes": decomp.size, "floor_index": decomp.floor_index,
            "n_clamped": decomp.n_clamped}
    try:
        info["decay"] = estimate_decay(decomp).to_json()
    except PathRKHSError as exc:
        info["decay"] = None
        info["notes"] = [str(exc)]
    return {"spectrum.csv": decomp.to_csv(), "spectrum.json": dumps(info)}, 0


def _run_analyze(config, kernel, params):
    verdict = rkhs_path_verdict(kernel, _rule(config, kernel))
    return {"verdict.json": dumps(_verdict_json(verdict))}, (2 if verdict.decision == INCONCLUSIVE else 0)


def _run_power_kernel(config, kernel, params):
    decomp = _decomposition(config, kernel)
    pk = power_kernel(decomp, params.get("beta", 0.5), params.get("N"))
    grid = pk.monitor.grid
    out = {"kernel": kernel.spec, "beta": pk.beta, "N": pk.truncation,
           "monitor": pk.monitor.summary(),
           "grid": grid.tolist(), "diagonal": pk.monitor.diagonal.tolist()}
    return {"power_kernel.json": dumps(out)}, 0


def _run_sample(config, kernel, params):
    decomp = _decomposition(config, kernel)
    samples = kl_sample(decomp, params.get("N"), config["seed"], params.get("count", 10))
    files = {}
    if decomp.rule.dimension == 1:
        width = max(4, len(str(len(samples) - 1)))
        for s in samples:
            files[os.path.join("paths", f"sample_{s.index:0{width}d}.csv")] = s.to_csv()
    stats = norm_stats(samples, decomp, params.get("beta", 0.5)).to_json()
    stats["seed"] = config["seed"]
    files["norm_stats.json"] = dumps(stats)
    return files, 0


def _run_dominance(config, kernel, params):
    if "kernel2" not in params:
        raise SchemaError("dominance needs params.kernel2", operation="dominance")
    k2 = kernel_from_json(params["kernel2"])
    report = dominance_trace(kernel, k2, params.get("grid_sizes", (64, 128, 256, 512)),
                             params.get("ridge", 1e-10))
    out = {"kernel1": kernel.spec, "kernel2": k2.spec}
    out.update(report.to_json())
    return {"dominance.json": dumps(out)}, 0


def _run_rank_diff(config, kernel, params):
    if "kernel2" not in params:
        raise SchemaError("rank-diff needs params.kernel2", operation="rank-diff")
    k2 = kernel_from_json(params["kernel2"])
    rule = _rule(config, kernel)
    if rule is None:
        n = params.get("n", 64)
        if kernel.domain.kind == INTERVAL:
            rule = gauss_legendre(n, *kernel.domain.bounds[0])
        else:
            rule = uniform_midpoint(n, kernel.domain)
    report = finite_rank_difference(kernel, k2, rule, params.get("tol", 1e-8))
    out = {"kernel1": kernel.spec, "kernel2": k2.spec}
    out.update(report.to_json())
    return {"rank.json": dumps(out)}, 0


def _run_tensor(config, kernel, params):
    decomp = _decomposition(config, kernel)
    verdict = tensor_verdict(decomp, params.get("d", 2), params.get("budget", 64))
    return {"tensor.json": dumps(_verdict_json(verdict))}, 0


def _run_reproduce(config, params):
    rows = reproduce_paper_table(params.get("only"))
    out = {"rows": [r.to_json() for r in rows], "mismatches": sum(not r.passed for r in rows)}
    return {"reproduce.json": dumps(out)}, (1 if out["mismatches"] else 0)


RUNNERS = {"spectrum": _run_spectrum, "analyze": _run_analyze,
           "power-kernel": _run_power_kernel, "sample": _run_sample,
           "dominance": _run_dominance, "rank-diff": _run_rank_diff, "tensor": _run_tensor}


def execute(config):
    """Run a resolved job; returns ``({relative path: text}, exit status)``."""
    params = config["params"]
    if config["command"] == "reproduce":
        return _run_reproduce(config, params)
    kernel = kernel_from_json(config["kernel"])
    return RUNNERS[config["command"]](config, kernel, params)


def manifest(config, files):
    return {
        "config": config,
        "config_sha256": hashlib.sha256(_canonical(config).encode()).hexdigest(),
        "versions": {"pathrkhs": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__, "python": platform.python_version()},
        "seeds": [config["seed"]],
        "prng": PRNG,
        "outputs": {name: hashlib.sha256(text.encode()).hexdigest()
                    for name, text in sorted(files.items())},
    }


def _write(out_dir, files):
    for name, text in files.items():
        path = os.path.join(out_dir, name)
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _error_payload(exc, config):
    module = getattr(exc, "module", None) or "cli"
    operation = getattr(exc, "operation", None) or (config or {}).get("command") or "run"
    return {"error": f"{type(exc).__name__}: {exc}", "module": module, "operation": operation}


def run(config, out_dir):
    """Execute ``config`` and write its artifacts into ``out_dir``; returns the exit status."""
    os.makedirs(out_dir, exist_ok=True)
    try:
        files, status = execute(config)
    except (PathRKHSError, ArithmeticError, ValueError, TypeError, KeyError) as exc:
        _write(out_dir, {"error.json": dumps(_error_payload(exc, config))})
        print(f"error: {exc}", file=sys.stderr)
        return 1
    files["manifest.json"] = dumps(manifest(config, files))
    _write(out_dir, files)
    return status


def build_parser():
    p = argparse.ArgumentParser(prog="pathrkhs",
                                description="Decide whether an RKHS of bounded functions can "
                                            "carry the paths of a Gaussian process.")
    p.add_argument("--config", help="job JSON file or manifest; standard input when omitted")
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    p.add_argument("--command", choices=COMMANDS, help="overrides the config's command")
    p.add_argument("--seed", type=int, help="unsigned 64-bit seed; overrides the config's seed")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    config = None
    try:
        if args.config is None:
            text = sys.stdin.read()
        else:
            with open(args.config) as fh:
                text = fh.read()
        config = resolve(load_config(text), args.command, args.seed)
    except (PathRKHSError, OSError) as exc:
        os.makedirs(args.out, exist_ok=True)
        _write(args.out, {"error.json": dumps(_error_payload(exc, config))})
        print(f"error: {exc}", file=sys.stderr)
        return 1
    status = run(config, args.out)
    if status != 1 and config["command"] in ("analyze", "tensor"):
        name = "verdict.json" if config["command"] == "analyze" else "tensor.json"
        with open(os.path.join(args.out, name)) as fh:
            print(json.load(fh)["decision"])
    return status


if __name__ == "__main__":
    sys.exit(main())
