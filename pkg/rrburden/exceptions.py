#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Errors raised by rrburden.

Two families exist. A `ValidationError` means the caller handed over something
malformed (bad labels, out of range hyperparameters, mismatched lengths) and
maps to CLI exit code 2. A `RuntimeFailure` means valid inputs could not be
processed (too short, single class, unreachable burden, wrong weights version)
and maps to CLI exit code 3.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# ------------------------------------------------------------------------------
# BASE CLASSES
# ------------------------------------------------------------------------------


class RrBurdenError(Exception):
    """Base class for every error raised by rrburden."""


class ValidationError(RrBurdenError):
    """Inputs or configuration are invalid."""


class RuntimeFailure(RrBurdenError):
    """Valid inputs could not be processed."""


# ------------------------------------------------------------------------------
# VALIDATION ERRORS
# ------------------------------------------------------------------------------


class InvalidLabel(ValidationError):
    pass


class InvalidRecording(ValidationError):
    pass


class InvalidHyperparam(ValidationError):
    pass


class InvalidParams(ValidationError):
    pass


class ConfigValidationError(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


class NonPositiveDuration(ValidationError):
    pass


class EmptySequence(ValidationError):
    pass


class EmptySpace(ValidationError):
    pass


class EmptyCohort(ValidationError):
    pass


class MissingMetadata(ValidationError):
    pass


class JoinMismatch(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class MissingCache(ValidationError):
    pass


class DegenerateProportions(ValidationError):
    pass


# ------------------------------------------------------------------------------
# RUNTIME FAILURES
# ------------------------------------------------------------------------------


class RecordingTooShort(RuntimeFailure):
    pass


class SingleClassDataset(RuntimeFailure):
    pass


class NoTrainingData(RuntimeFailure):
    pass


class BurdenUnreachable(RuntimeFailure):
    pass


class WeightsVersionMismatch(RuntimeFailure):
    pass


class NoAflWindows(RuntimeFailure):
    pass


class IoError(RuntimeFailure):
    pass
