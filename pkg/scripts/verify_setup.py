"""Script to verify the NHC Lab setup is correct."""

import importlib
import importlib.util
import os
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from dotenv import load_dotenv

ENV_PARSERS = {
    "NHC_SEED": int,
    "NHC_NUM_SAMPLES": int,
    "NHC_STRENGTH": float,
    "NHC_MAX_WORKERS": int,
}

PACKAGES = ["numpy", "scipy", "pandas", "duckdb", "dotenv", "streamlit", "tenacity", "pydantic", "pytest", "hypothesis"]

PROJECT_DIRS = ["src", "scripts", "configs"]

LAYERS = {
    "src.config": "Configuration",
    "src.classifier": "Classifier",
    "src.data": "Dataset generators",
    "src.adapters": "Dataset files",
    "src.estimators": "Estimators",
    "src.attacks": "Attacks",
    "src.harness": "Evaluation harness",
    "src.catalog": "Run catalog",
}


def _mark(ok: bool, text: str) -> bool:
    print(f"  {'✓' if ok else '✗'} {text}")
    return ok


def check_environment() -> bool:
    """Estimator defaults in .env must parse as their declared types."""
    print("🔍 Checking environment variables...")
    load_dotenv()

    results = []
    for key, parse in ENV_PARSERS.items():
        raw = os.getenv(key)
        if raw is None:
            print(f"  • {key} unset (built-in default applies)")
            continue
        try:
            parse(raw)
            results.append(_mark(True, f"{key}={raw}"))
        except ValueError:
            results.append(_mark(False, f"{key}={raw!r} is not {parse.__name__}"))

    distribution = os.getenv("NHC_DISTRIBUTION", "rademacher")
    results.append(_mark(distribution in ("rademacher", "gaussian", "uniform"), f"NHC_DISTRIBUTION={distribution}"))
    return all(results)


def check_packages() -> bool:
    print("\n📦 Checking dependencies...")
    found = [_mark(importlib.util.find_spec(name) is not None, name) for name in PACKAGES]
    return all(found)


def check_layout() -> bool:
    print("\n📁 Checking project layout...")
    return all([_mark(Path(d).is_dir(), f"{d}/") for d in PROJECT_DIRS])


def check_layers() -> bool:
    print("\n🔧 Importing project layers...")
    outcomes = []
    for module_name, label in LAYERS.items():
        try:
            importlib.import_module(module_name)
            outcomes.append(_mark(True, f"{label} ({module_name})"))
        except Exception as e:
            outcomes.append(_mark(False, f"{label} ({module_name}): {str(e)[:60]}"))
    return all(outcomes)


def check_catalog() -> bool:
    print("\n💾 Opening run catalog...")
    try:
        from src.catalog import RunCatalog
        catalog = RunCatalog()
        return _mark(True, f"{catalog.db_path} holds {len(catalog.list_runs())} runs")
    except Exception as e:
        return _mark(False, f"run catalog unavailable: {e}")


def check_smoke_score() -> bool:
    """Monte Carlo NHC on a hand-set boundary should land near the exact value."""
    print("\n🧪 Scoring one point...")
    try:
        import numpy as np
        from src.classifier import MlpModel
        from src.estimators import NoiseSpec, nhc, nhc_exact_rademacher

        model = MlpModel([2, 2], [np.array([[-1.0, 0.0], [1.0, 0.0]])], [np.zeros(2)])
        spec = NoiseSpec(distribution="rademacher", strength=0.2, num_samples=2000)
        estimate = nhc(model, [0.1, 0.0], spec).value
        exact = nhc_exact_rademacher(model, [0.1, 0.0], 0.2)
        return _mark(abs(estimate - exact) < 0.05, f"NHC {estimate:.3f} vs exact {exact:.3f}")
    except Exception as e:
        return _mark(False, f"smoke score failed: {e}")


def main() -> int:
    banner = "=" * 60
    print(f"{banner}\nNHC Lab Setup Verification\n{banner}\n")

    outcome = {
        "Environment": check_environment(),
        "Dependencies": check_packages(),
        "Layout": check_layout(),
        "Imports": check_layers(),
        "Run catalog": check_catalog(),
        "Smoke score": check_smoke_score(),
    }

    print(f"\n{banner}\nSummary\n{banner}")
    for name, ok in outcome.items():
        print(f"{'✓ PASS' if ok else '✗ FAIL'}: {name}")
    print(f"\n{banner}")

    ready = all(outcome.values())
    if ready:
        print("✅ Setup looks good.")
        print("\nTry next:")
        print("1. pytest")
        print("2. python -m src run --config configs/default_experiment.json")
        print("3. streamlit run streamlit_app.py")
    else:
        print("❌ Setup incomplete, see the ✗ lines above.")
        print("\nUsual fixes:")
        print("- pip install -r requirements.txt")
        print("- compare .env with .env.example")
    print(banner)
    return 0 if ready else 1


if __name__ == "__main__":
    sys.exit(main())
