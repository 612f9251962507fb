"""Compare the compiled kernels with the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the batched Jacobi SVD and Haar pyramid on paper-sized workloads, then
an end-to-end embed + adaptive extract of the paper configuration with each
backend swapped in.
"""
import argparse
import timeit

import numpy as np

import dualmark.kernels as kernels
from dualmark import codec, detect
from dualmark.kernels import _pykernels
from dualmark.synth import synthetic_speech

try:
    from dualmark.kernels import _ckernels
except ImportError:
    _ckernels = None

WM_DWT = "College of Engineering, Trivandrum, India"
WM_DCT = "Jerrin Thomas Panachakel"


def _use(impl):
    kernels.haar_analysis = impl.haar_analysis
    kernels.haar_synthesis = impl.haar_synthesis
    kernels.svd_batch = impl.svd_batch


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    mats3 = rng.uniform(-1, 1, (175, 3, 3))
    mats4 = rng.uniform(-1, 1, (294, 4, 4))
    frames = rng.standard_normal((294, 272))
    host = synthetic_speech(10.0)

    def end_to_end():
        wm, kf = codec.embed_multilevel(host, WM_DWT, WM_DCT, 0.05)
        detect.extract(wm, kf, detect.Detector.ADAPTIVE)

    impls = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    results = {}
    for name, impl in impls:
        _use(impl)
        results[name] = {
            "svd 175x3x3": _time(lambda: impl.svd_batch(mats3), args.repeat),
            "svd 294x4x4": _time(lambda: impl.svd_batch(mats4), args.repeat),
            "haar fwd 294x272": _time(lambda: impl.haar_analysis(frames, 4), args.repeat),
            "haar inv 294x272": _time(lambda: impl.haar_synthesis(frames, 4), args.repeat),
            "embed+extract (10 s)": _time(end_to_end, args.repeat),
        }

    names = [n for n, _ in impls]
    print(f"{'workload':<24}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label in results["python"]:
        row = f"{label:<24}" + "".join(f"{results[n][label] * 1e3:>10.2f}ms" for n in names)
        if len(names) == 2:
            row += f"{results['python'][label] / results['cython'][label]:>11.1f}x"
        print(row)
    if _ckernels is None:
        print("compiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
