"""
Dataset pipeline: statistics, splits, encodings, prompts
========================================================

Builds a small synthetic corpus, then walks the dataset tooling: the
statistics table, review-set-level splits, the three marker encodings, the
coverage-classifier training samples, and a 1-shot prompt.
"""

import random
import warnings

from fusebench.dataset import (
    EncodingMode,
    assign_splits,
    build_kshot_prompt,
    compute_statistics,
    decode_markup,
    generate_coverage_training_data,
    render_input,
    render_statistics,
)

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from conftest import random_instance  # reuse the test corpus generator

rng = random.Random(0)
instances = [random_instance(rng, set_id=f"set-{k}") for k in range(20)]

print(render_statistics(compute_statistics(instances)))

plan = assign_splits([i.review_set.id for i in instances], (0.8, 0.1, 0.1), seed=0)
print("\nsplit sizes:", {s.value: sum(1 for v in plan.values() if v is s)
                         for s in set(plan.values())})

inst = instances[0]
encoded = render_input(inst, EncodingMode.WITH_HIGHLIGHTS)
print("\nmarked-up input (first 200 chars):")
print(encoded.text[:200])
stripped, spans = decode_markup(encoded.text)
print(f"decoded back: {len(spans)} highlight span(s), "
      f"matches plain rendering: "
      f"{stripped == render_input(inst, EncodingMode.NO_HIGHLIGHTS).text}")

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    samples = generate_coverage_training_data(inst, seed=0)
print(f"\ncoverage samples: {len(samples)} "
      f"({sum(s.label == 'Yes' for s in samples)} yes / "
      f"{sum(s.label == 'No' for s in samples)} no)")

exemplar = (render_input(instances[1], EncodingMode.ONLY_HIGHLIGHTS),
            instances[1].fused_text.text)
target = render_input(inst, EncodingMode.ONLY_HIGHLIGHTS)
print("\n1-shot prompt:")
print(build_kshot_prompt([exemplar], target, k=1))
