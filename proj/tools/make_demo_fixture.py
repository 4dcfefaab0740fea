#!/usr/bin/env python3
"""Regenerates data/statistics_demo_assistments.csv.

20 pseudo-id students, five statistics knowledge components with two
problems each, laid out in the skill-builder column format. Three latent
student profiles give the clustering something to find. Output is fully
determined by the seed.
"""

import csv
import random
import sys
from pathlib import Path

SEED = 2010
SKILLS = [
    (47, "Mean"),
    (32, "Circle Graph"),
    (110, "Venn Diagram"),
    (277, "Box and Whisker Plot"),
    (50, "Scatter Plot"),
]
PROBLEMS = {
    "Mean": [30211, 30213],
    "Circle Graph": [37043, 37046],
    "Venn Diagram": [51321, 51323],
    "Box and Whisker Plot": [57802, 57811],
    "Scatter Plot": [48570, 48574],
}
# Probability of an incorrect first response / expected hints per problem.
PROFILES = {
    "steady": ({}, 0.08, 0.05),
    "plots": ({"Box and Whisker Plot", "Scatter Plot"}, 0.75, 0.4),
    "averages": ({"Mean", "Venn Diagram"}, 0.7, 0.3),
}
HEADER = [
    "order_id", "assignment_id", "user_id", "assistment_id", "problem_id", "original",
    "correct", "attempt_count", "ms_first_response", "skill_id", "skill_name",
    "hint_count", "hint_total",
]


def main(out: Path) -> None:
    rng = random.Random(SEED)
    users = sorted(rng.sample(range(70000, 99999), 20))
    profile_of = {}
    for i, user in enumerate(users):
        profile_of[user] = ["steady", "plots", "averages"][i % 3]

    rows = []
    for user in users:
        weak, p_wrong, hint_rate = PROFILES[profile_of[user]]
        clock = rng.uniform(0, 40_000)
        for skill_id, skill in SKILLS:
            for problem in PROBLEMS[skill]:
                struggling = skill in weak
                wrong = rng.random() < (p_wrong if struggling else 0.1)
                hints = 0
                if struggling:
                    hints = sum(rng.random() < hint_rate for _ in range(2))
                elif rng.random() < 0.02:
                    hints = 1
                ms_first = rng.randint(8_000, 60_000)
                clock += ms_first + hints * 5_000
                rows.append({
                    "time": clock,
                    "assignment_id": 33331,
                    "user_id": user,
                    "assistment_id": problem - 8000,
                    "problem_id": problem,
                    "original": 1,
                    "correct": 0 if wrong else 1,
                    "attempt_count": 2 if wrong else 1,
                    "ms_first_response": ms_first,
                    "skill_id": skill_id,
                    "skill_name": skill,
                    "hint_count": hints,
                    "hint_total": 3,
                })
    rows.sort(key=lambda r: r["time"])
    base = 33_500_000
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for i, r in enumerate(rows):
            r["order_id"] = base + 17 * i + rng.randint(0, 9)
            writer.writerow([r[c] for c in HEADER])


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "statistics_demo_assistments.csv"
    main(target)
