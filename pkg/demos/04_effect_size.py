#!/usr/bin/env python3
"""Walkthrough: quantifying an A/B difference with the Vargha-Delaney Â12.

Repeats short protected and baseline campaigns over several RNG seeds,
collects the final valid counts, and reports the probability that a random
protected run beats a random baseline run. 0.5 means no effect; 1.0 means
total dominance.
"""

import tempfile
from pathlib import Path

from truzz import Budget, CampaignConfig, SchedulerConfig, a12, run_campaign
from truzz.targets import bundled_seed, write_bundled

BUDGET = 50_000
SEEDS = range(5)


def final_valid(workdir: Path, label: str, spec_path: str, protected: bool, rng_seed: int):
    corpus = workdir / f"{label}_{rng_seed}"
    (corpus / "seeds_in").mkdir(parents=True)
    (corpus / "seeds_in" / "seed").write_bytes(bundled_seed("header128"))
    stats = run_campaign(
        CampaignConfig(
            corpus_dir=str(corpus),
            target_spec=spec_path,
            budget=Budget(max_execs=BUDGET),
            scheduler=SchedulerConfig(policy="truzz" if protected else "fifo"),
            mask_enabled=protected,
            rng_seed=rng_seed,
            stats_interval=BUDGET,
        )
    )
    return stats.valid_count


def main():
    with tempfile.TemporaryDirectory() as tmp:
        workdir = Path(tmp)
        spec_path, _ = write_bundled("header128", workdir / "target")
        protected = [
            final_valid(workdir, "protected", spec_path, True, s) for s in SEEDS
        ]
        baseline = [
            final_valid(workdir, "baseline", spec_path, False, s) for s in SEEDS
        ]
        print(f"protected valid counts: {protected}")
        print(f"baseline  valid counts: {baseline}")
        result = a12(protected, baseline)
        print(f"A12 = {result.score:.3f} ({result.magnitude.value} effect)")


if __name__ == "__main__":
    main()
