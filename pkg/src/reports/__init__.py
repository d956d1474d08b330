"""Initialize reports module"""

from .generator import ReportGenerator, SubsetResult, ValidationReport, aggregate, tag_best_in_class

__all__ = ["ReportGenerator", "SubsetResult", "ValidationReport", "aggregate", "tag_best_in_class"]
