"""
Test script to verify the caching lab setup.

Run this after installing dependencies to verify everything works.
"""

import os
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))


def test_imports():
    """Test that all critical imports work."""
    print("=" * 60)
    print("TESTING IMPORTS")
    print("=" * 60)

    tests = []

    try:
        from src.schemes import GroupingScheme, MnScheme
        print("✅ Scheme imports: OK")
        tests.append(("Schemes", True))
    except Exception as e:
        print(f"❌ Scheme imports: FAILED - {e}")
        tests.append(("Schemes", False))

    try:
        from src.simulation import run, sweep_demands
        print("✅ Simulation imports: OK")
        tests.append(("Simulation", True))
    except Exception as e:
        print(f"❌ Simulation imports: FAILED - {e}")
        tests.append(("Simulation", False))

    try:
        from evaluation.asymptotics import trend_table
        from evaluation.battery import run_battery
        print("✅ Evaluation imports: OK")
        tests.append(("Evaluation", True))
    except Exception as e:
        print(f"❌ Evaluation imports: FAILED - {e}")
        tests.append(("Evaluation", False))

    try:
        import config
        print("✅ Config import: OK")
        tests.append(("Config", True))
    except Exception as e:
        print(f"❌ Config import: FAILED - {e}")
        tests.append(("Config", False))

    try:
        from src.cli.main import build_parser
        build_parser()
        print("✅ CLI parser: OK")
        tests.append(("CLI", True))
    except Exception as e:
        print(f"❌ CLI parser: FAILED - {e}")
        tests.append(("CLI", False))

    print("\n" + "=" * 60)
    passed = sum(1 for _, status in tests if status)
    total = len(tests)
    print(f"RESULTS: {passed}/{total} tests passed")
    print("=" * 60 + "\n")

    return all(status for _, status in tests)


def test_environment():
    """Show any SYMCACHE_* overrides picked up from the environment."""
    print("=" * 60)
    print("CHECKING ENVIRONMENT")
    print("=" * 60)

    import config

    overrides = sorted(k for k in os.environ if k.startswith("SYMCACHE_"))
    if overrides:
        for key in overrides:
            print(f"✅ {key}={os.environ[key]}")
    else:
        print("⚠️  No SYMCACHE_* overrides set (using defaults)")
    print(f"   payload_bytes={config.DEFAULT_PAYLOAD_BYTES} seed={config.DEFAULT_SEED} "
          f"exhaustive_cap={config.EXHAUSTIVE_DEMAND_CAP}")
    print()
    return True


def test_small_instance():
    """Decode one small instance end to end."""
    print("=" * 60)
    print("TESTING A SMALL INSTANCE")
    print("=" * 60)

    try:
        from src.schemes import MnScheme
        from src.simulation import distinct_demand, pack, random_files, run

        scheme = MnScheme(4, 4, 2)
        store = pack(random_files(scheme.N, 32, 0), scheme.F)
        result = run(scheme, store, distinct_demand(scheme.K, scheme.N))
        print(f"   {result.to_record()}")
        if not result.verified:
            print("❌ Decoding mismatch\n")
            return False
        print("\n✅ Instance decoded\n")
        return True
    except Exception as e:
        print(f"❌ Instance run failed: {e}\n")
        return False


def main():
    print("\n" + "=" * 60)
    print("SYMMETRIC CACHING LAB - SETUP VERIFICATION")
    print("=" * 60 + "\n")

    results = {
        "Imports": test_imports(),
        "Environment": test_environment(),
        "Small instance": test_small_instance(),
    }

    print("=" * 60)
    print("FINAL SUMMARY")
    print("=" * 60)
    for name, status in results.items():
        print(f"{'✅' if status else '❌'} {name}")
    print()

    if all(results.values()):
        print("🎉 Setup looks good! Next: pytest -m \"not slow\"")
        return 0
    print("⚠️  Some checks failed; see the messages above.")
    return 1


if __name__ == "__main__":
    sys.exit(main())
