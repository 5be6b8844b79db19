#!/usr/bin/env python3
"""Writes a synthetic survey definition and response set.

Question ids and the factor mapping are invented; questionnaire sizes are
16 for Baseline and 35 for the Intermediate and PostPilot phases.
"""
import argparse
import json
import random

FACTORS = (
    ("Comfort", range(1, 7), range(17, 24)),
    ("Safety", range(7, 12), range(24, 30)),
    ("Awareness", range(12, 17), range(30, 36)),
)
# mean shift per phase and factor, in Likert points
SHIFT = {
    "Baseline": {"Comfort": 0.0, "Safety": 0.0, "Awareness": 0.0},
    "Intermediate": {"Comfort": 0.2, "Safety": 0.1, "Awareness": 0.9},
    "PostPilot": {"Comfort": 0.4, "Safety": 0.3, "Awareness": 1.6},
}
BASE = {"Comfort": 3.0, "Safety": 3.2, "Awareness": 1.8}


def questions(phase):
    out = []
    for factor, base_ids, later_ids in FACTORS:
        ids = list(base_ids) + ([] if phase == "Baseline" else list(later_ids))
        out += [("Q%02d" % q, factor) for q in ids]
    return sorted(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--definition", required=True)
    ap.add_argument("--responses", required=True)
    ap.add_argument("--respondents", type=int, default=12)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    with open(args.definition, "w") as f:
        json.dump({"synthetic": True,
                   "questions": [{"id": q, "factor": fac} for q, fac in questions("PostPilot")]},
                  f, indent=1)
        f.write("\n")

    with open(args.responses, "w") as f:
        f.write("respondent_id,phase,question_id,factor,score\n")
        for phase in ("Baseline", "Intermediate", "PostPilot"):
            for r in range(1, args.respondents + 1):
                for q, fac in questions(phase):
                    x = BASE[fac] + SHIFT[phase][fac] + rng.gauss(0.0, 0.8)
                    score = min(5, max(1, round(x)))
                    f.write("R%02d,%s,%s,%s,%d\n" % (r, phase, q, fac, score))


if __name__ == "__main__":
    main()
