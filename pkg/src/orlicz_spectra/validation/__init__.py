"""Validation package: dense oracle, translation estimates and property battery."""

from orlicz_spectra.validation.battery import (
    BatteryReport,
    CertificateReport,
    SubtestResult,
    eigenpair_certificate,
    oracle_cross_check,
    poincare_ratio,
    property_battery,
    translation_battery,
)
from orlicz_spectra.validation.oracle import OracleSpectrum, dense_oracle_p2
from orlicz_spectra.validation.translation import (
    SPHERE_MEASURE,
    ModularTranslationReport,
    TranslationReport,
    lemma_b1_test,
    translation_test,
)

__all__ = [
    "BatteryReport",
    "CertificateReport",
    "ModularTranslationReport",
    "OracleSpectrum",
    "SPHERE_MEASURE",
    "SubtestResult",
    "TranslationReport",
    "dense_oracle_p2",
    "eigenpair_certificate",
    "lemma_b1_test",
    "oracle_cross_check",
    "poincare_ratio",
    "property_battery",
    "translation_battery",
    "translation_test",
]
