#!/usr/bin/env python3
"""Walkthrough: A/B campaign with and without validation-byte protection.

Runs two 100k-execution campaigns on the bundled ``magic64`` target (an
8-byte magic header guarding the interesting code) from the same initial
seed and RNG seed: the protected configuration versus a vanilla baseline
(FIFO scheduling, no mask). Then compares the stats CSVs.
"""

import tempfile
from pathlib import Path

from truzz import Budget, CampaignConfig, SchedulerConfig, compare_campaigns, run_campaign
from truzz.targets import bundled_seed, write_bundled

BUDGET = 100_000


def campaign(workdir: Path, label: str, spec_path: str, protected: bool):
    corpus = workdir / label
    (corpus / "seeds_in").mkdir(parents=True)
    (corpus / "seeds_in" / "seed").write_bytes(bundled_seed("magic64"))
    cfg = CampaignConfig(
        corpus_dir=str(corpus),
        target_spec=spec_path,
        budget=Budget(max_execs=BUDGET),
        scheduler=SchedulerConfig(policy="truzz" if protected else "fifo"),
        mask_enabled=protected,
        rng_seed=0,
        stats_interval=10_000,
    )
    stats = run_campaign(cfg)
    ratio = stats.valid_count / stats.executions
    print(
        f"{label:9s}: {stats.executions} execs, "
        f"{stats.edges_covered} edges, valid ratio {ratio:.1%}"
    )
    return corpus / "stats.csv"


def main():
    with tempfile.TemporaryDirectory() as tmp:
        workdir = Path(tmp)
        spec_path, _ = write_bundled("magic64", workdir / "target")
        baseline = campaign(workdir, "baseline", spec_path, protected=False)
        protected = campaign(workdir, "protected", spec_path, protected=True)
        print()
        print(compare_campaigns(baseline, protected).render())


if __name__ == "__main__":
    main()
