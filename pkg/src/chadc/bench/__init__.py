"""Program families, cost measurement and complexity regression checks."""
from .families import FAMILIES, FamilySpec, Generated, family_point, gen_family
from .measure import (C_CTX, C_SEED, RULES, Report, Row, check_rule, default_rule, measure,
                      measure_family, regression_check)
from .report import figure_path, report_json, write_figure, write_report

__all__ = ["FAMILIES", "FamilySpec", "Generated", "family_point", "gen_family", "C_CTX",
           "C_SEED", "RULES", "Report", "Row", "check_rule", "default_rule", "measure",
           "measure_family", "regression_check", "figure_path", "report_json", "write_figure",
           "write_report"]
