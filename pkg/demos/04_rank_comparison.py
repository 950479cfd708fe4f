"""Friedman and Bonferroni-Dunn comparison of five models over 23 datasets.

Errors are test errors (scaled per dataset) of a second-order
fuzzy rule model without a penalty, with three uniform ridge strengths,
and with group-weighted ridge. Only the ranks matter, so the scaling
factors are irrelevant.
"""

import numpy as np

from rsfrm import compare_to_control, rank_table

models = ["plain", "ridge1", "ridge2", "ridge3", "ew"]
errors = np.array([
    [2.067, 2.040, 2.040, 6.691, 1.874], [1.130, 1.133, 1.133, 1.132, 1.132],
    [0.0179, 0.0191, 0.3382, 2.4153, 0.0179], [158274, 54555, 4972, 4666, 4353],
    [17.03, 0.803, 0.898, 1.410, 1.350], [13.32, 4.335, 3.926, 4.307, 3.692],
    [1.325, 1.325, 1.325, 1.326, 1.325], [0.454, 0.397, 0.108, 0.248, 0.079],
    [868.1, 1.006, 1.006, 1.008, 1.006], [21505, 0.132, 0.012, 0.008, 0.009],
    [38891, 4.143, 4.395, 9.636, 3.662], [7.691, 3.785, 3.384, 13.40, 2.277],
    [46345, 26.72, 26.74, 27.81, 27.54], [8.607, 0.526, 0.329, 0.518, 0.275],
    [1.449, 0.813, 0.813, 0.915, 0.734], [0.896, 0.807, 0.807, 6.192, 0.662],
    [2.370, 2.052, 2.138, 4.214, 2.039], [749436, 14594, 4121, 2094, 2137],
    [27.901, 0.1942, 0.0063, 0.0037, 0.0027], [151.28, 0.4980, 0.0187, 0.0202, 0.0165],
    [1658, 910.1, 5.108, 5.008, 2.215], [7114, 13548, 4.679, 10.59, 3.733],
    [2014, 27.94, 21.68, 12.74, 2.970],
])
datasets = ["d%02d" % i for i in range(len(errors))]

table = rank_table(errors, models, datasets)
print("average ranks:", np.round(table.avg_ranks, 2))

# F(4, 88) at alpha = 0.05 is 2.48
result = compare_to_control(table, "ew", alpha=0.05, critical_value=2.48)
fr = result.friedman
print("chi2 = %.3f, F_F = %.2f, df = (%d, %d), reject: %s"
      % (fr.chi_squared, fr.f_statistic, fr.df1, fr.df2, result.rejects_null))
print("critical difference: %.3f" % result.cd)
print(result.to_csv())
