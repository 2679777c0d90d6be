#!/usr/bin/env python
# coding: utf-8

from qspa_experiments import *

report = verify_truth_tables()
print(f"truth tables: {report.cases} cases, {report.mismatches} mismatches")

for name in ["basis", "general"]:
    for mode in ["verified-default", "paper-literal"]:
        self = main(name, mode=mode)
        self.save_results(f"results-{name}-{mode}.json")

print(replay_frame(SpinSystem()))

for model in [KnowledgeModel("all"), KnowledgeModel("target"), KnowledgeModel("all", True)]:
    table = leakage_frame(leakage_curve(model, 6))
    algebra = leakage_frame(leakage_curve(model, 3, method="algebra"))
    print(model.name)
    print(table)
    print("max |table - algebra| over 3 rounds:",
          (table.iloc[:3] - algebra).abs().values.max())
