"""
Codebook Management Module for gfcodebook.

Drives the build, analyze, verify, table and export workflows behind the
command line. Like a GUI data manager it reports status lines and progress
percentages through optional callbacks, and returns (success, message, result)
tuples instead of raising; the exit code of the last call is kept on the
manager.
"""

import logging
import os
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from gfcodebook.core import analysis, characters
from gfcodebook.core.constructions import (
    CONSTRUCTIONS,
    MAX_ENTRIES,
    build_codebook,
    build_set_I,
    build_set_II,
    indicator_I,
    indicator_II,
)
from gfcodebook.core.errors import BudgetExceededError, CodebookError, IntegrityError, ParameterError
from gfcodebook.core.field import (
    DEFAULT_BUDGET,
    TowerParams,
    build_tower,
    verify_embedding,
    verify_trace_properties,
    verify_trace_transitivity,
)
from gfcodebook.core.optimization import get_optimal_thread_count
from gfcodebook.core.verification import VerificationReport
from gfcodebook.utils.codebook_file import FORMS, read_codebook_file, write_codebook_file
from gfcodebook.utils.report import FORMATS
from gfcodebook.utils.tables import regenerate_table

logger = logging.getLogger(__name__)

SUITES = ("gauss", "fourier", "trace", "lemmaA", "lemmaB", "bent", "PQ", "distribution")
EXTRA_SUITES = ("orthogonality", "restriction", "embedding", "decomposition", "indicators", "oracle")

# Fields up to this order get the all-characters Fourier expansion check.
FOURIER_LIMIT = 243


class ExitCode(IntEnum):
    OK = 0
    FAILED = 1
    USAGE = 2


@dataclass
class RunConfig:
    """Settings of one command-line run."""
    construction: str = "II"
    p: int = 3
    t: int = 1
    s: int = 1
    budget: int = DEFAULT_BUDGET
    fmt: str = "json"
    out: str = None
    precision: int = 4
    form: str = "exponent"
    max_entries: int = MAX_ENTRIES
    workers: int = field(default_factory=get_optimal_thread_count)

    @property
    def params(self):
        return TowerParams(self.p, self.t, self.s)

    def validate(self, exhaustive=False):
        """
        Check the settings.

        Args:
            exhaustive: Also require the construction's largest field to fit the budget.

        Raises:
            ParameterError
        """
        params = self.params
        if self.construction not in CONSTRUCTIONS:
            raise ParameterError(f"construction must be one of {CONSTRUCTIONS}, got {self.construction!r}")
        if self.construction == "I" and params.s % params.p == 0:
            raise ParameterError(f"Construction I needs p not dividing s, got {params.label()}")
        if self.fmt not in FORMATS:
            raise ParameterError(f"format must be one of {FORMATS}, got {self.fmt!r}")
        if self.form not in FORMS:
            raise ParameterError(f"form must be one of {FORMS}, got {self.form!r}")
        if self.precision < 0 or self.budget < 1 or self.max_entries < 1 or self.workers < 1:
            raise ParameterError("precision must be >= 0; budget, max_entries and workers >= 1")
        if exhaustive:
            params.check_budget(self.budget, "q" if self.construction == "I" else "q2")
        return self

    def default_path(self):
        return f"codebook_{self.construction}_{self.p}_{self.t}_{self.s}.txt"


class CodebookManager:
    """Runs gfcodebook workflows and reports their progress."""

    def __init__(self, status_callback=None, progress_callback=None):
        """
        Initialize the CodebookManager.

        Args:
            status_callback: Function to call with status updates
            progress_callback: Function to call with progress updates
        """
        self.status_callback = status_callback
        self.progress_callback = progress_callback
        self.codebook = None
        self.report = None
        self.exit_code = ExitCode.OK

    def update_status(self, message):
        """Update status message."""
        logger.info(message)
        if self.status_callback:
            self.status_callback(message)

    def update_progress(self, value):
        """Update progress."""
        if self.progress_callback:
            self.progress_callback(value)

    def _fail(self, error, action):
        if isinstance(error, IntegrityError):
            self.exit_code = ExitCode.FAILED
        else:
            self.exit_code = ExitCode.USAGE
        self.update_status(f"{action} failed: {error}")
        return False, f"{action} failed: {error}", None

    def build(self, config):
        """
        Build a codebook and write it to config.out.

        Returns:
            tuple: (success, message, digest)
        """
        try:
            config.validate(exhaustive=True)
            self.update_progress(0)
            self.update_status(f"Building field tower {config.params.label()}...")
            tower = build_tower(config.params, config.budget, with_q2=(config.construction == "II"))
            self.update_progress(40)
            self.update_status(f"Building Construction {config.construction} defining set...")
            self.codebook = build_codebook(config.construction, tower)
            self.update_progress(70)
            path = config.out or config.default_path()
            digest = write_codebook_file(self.codebook, path, config.form, config.max_entries)
            self.update_progress(100)
            self.exit_code = ExitCode.OK
            message = f"Wrote {self.codebook.N} x {self.codebook.K} codebook to {os.path.basename(path)}"
            self.update_status(message)
            return True, message, digest
        except CodebookError as e:
            return self._fail(e, "Build")

    def export(self, source, config):
        """
        Re-read a codebook file, check it against a rebuild and write it in config.form.

        Returns:
            tuple: (success, message, digest)
        """
        try:
            config.validate()
            self.update_status(f"Reading {os.path.basename(source)}...")
            self.codebook = read_codebook_file(source, config.budget)
            self.update_progress(60)
            path = config.out or f"{os.path.splitext(source)[0]}_{config.form}.txt"
            digest = write_codebook_file(self.codebook, path, config.form, config.max_entries)
            self.update_progress(100)
            self.exit_code = ExitCode.OK
            return True, f"Exported {os.path.basename(source)} as {config.form} form to {path}", digest
        except CodebookError as e:
            return self._fail(e, "Export")

    def analyze(self, config):
        """
        Analysis report for the configured parameters.

        Returns:
            tuple: (success, message, AnalysisReport)
        """
        try:
            config.validate()
            self.update_status(f"Analyzing Construction {config.construction} {config.params.label()}...")
            self.update_progress(10)
            self.report = analysis.ratio_report(config.params, config.construction, config.budget,
                                                workers=config.workers)
            self.update_progress(100)
            self.exit_code = ExitCode.OK
            return True, f"Analysis complete ({self.report.tier} tier)", self.report
        except CodebookError as e:
            return self._fail(e, "Analysis")

    def table(self, section, rows, config):
        """
        Regenerate a published table.

        Returns:
            tuple: (success, message, list of row dicts)
        """
        try:
            self.update_status(f"Regenerating table {section}...")
            results = regenerate_table(section, rows, config.budget, config.workers, self.update_progress)
            flagged = [r["row"] for r in results if r["flagged"]]
            self.exit_code = ExitCode.OK
            note = f"; rows {flagged} disagree with the published cells" if flagged else ""
            return True, f"Regenerated {len(results)} rows of table {section}{note}", results
        except CodebookError as e:
            return self._fail(e, "Table")

    # -- verification --

    def _suite_runners(self, config):
        params = config.params

        def needs_p_not_dividing_s():
            if params.s % params.p == 0:
                raise ParameterError("lemma applies only when p does not divide s")

        def gauss(tower):
            report = VerificationReport("gauss")
            skipped_levels = []
            for level in ("r", "q", "q2"):
                ctx = _level_or_none(tower, level)
                if ctx is None:
                    continue
                if (ctx.order * ctx.group_order <= config.budget
                        and characters.gauss_matrix_bytes(ctx) <= characters.GAUSS_BYTES_LIMIT):
                    report.merge(characters.verify_gauss_properties(tower, level, config.budget))
                else:
                    skipped_levels.append(level)
            if not report.checked:
                raise BudgetExceededError("Gauss matrix", params.q, "the Gauss matrix limit")
            report.details["levels_skipped"] = skipped_levels
            return report

        def fourier(tower):
            report = VerificationReport("fourier")
            for level in ("r", "q", "q2"):
                ctx = _level_or_none(tower, level)
                if ctx is not None and ctx.order <= FOURIER_LIMIT:
                    report.merge(characters.verify_fourier_expansion(tower, level, budget=config.budget))
            if not report.checked:
                raise BudgetExceededError("Fourier expansion", params.r, FOURIER_LIMIT)
            return report

        def trace(tower):
            report = verify_trace_transitivity(tower)
            if params.q * params.q <= config.budget:
                report.merge(verify_trace_properties(tower))
            return report

        def lemma_a(tower):
            needs_p_not_dividing_s()
            return analysis.verify_lemma_A(tower)

        def lemma_b(tower):
            needs_p_not_dividing_s()
            return analysis.verify_lemma_B(tower)

        def bent(tower):
            _require_q2(tower)
            return analysis.verify_bent(tower, config.budget, config.workers)

        def pq(tower):
            _require_q2(tower)
            return analysis.verify_P_Q(tower, config.budget, config.workers)

        def distribution(tower):
            _require_q2(tower)
            return analysis.verify_distribution(build_set_II(tower), workers=config.workers)

        def orthogonality(tower):
            report = VerificationReport("orthogonality")
            for level in ("r", "q"):
                ctx = tower.field(level)
                if ctx.order * ctx.order <= config.budget:
                    report.merge(characters.verify_additive_orthogonality(tower, level))
                    report.merge(characters.verify_multiplicative_orthogonality(tower, level))
            return report

        def restriction(tower):
            return characters.verify_restriction(tower)

        def embedding(tower):
            return verify_embedding(tower)

        def decomposition(tower):
            report = VerificationReport("decomposition")
            if params.s % params.p:
                report.merge(analysis.verify_decomposition_I(build_set_I(tower)))
            if tower.ctx_q2 is not None:
                report.merge(analysis.verify_decomposition_II(build_set_II(tower), config.budget, config.workers))
            return report

        def indicators(tower):
            report = VerificationReport("indicators")
            if params.s % params.p:
                x = tower.ctx_q.elements()
                member = np.isin(x, build_set_I(tower).elements)
                report.record_many(indicator_I(tower, x) == member, lambda i: {"construction": "I", "x": i})
            if tower.ctx_q2 is not None:
                x = tower.ctx_q2.elements()
                member = np.isin(x, build_set_II(tower).elements)
                report.record_many(indicator_II(tower, x) == member, lambda i: {"construction": "II", "x": i})
            return report

        def oracle(tower):
            _require_q2(tower)
            report = VerificationReport("oracle")
            dset = build_set_II(tower)
            codebook = build_codebook("II", tower)
            reduced = analysis.distribution_II(dset, workers=config.workers)
            brute = analysis.brute_force_distribution(codebook, config.budget)
            report.record(reduced == brute, construction="II", reduced=reduced, brute_force=brute)
            if params.s % params.p:
                dset_i = build_set_I(tower)
                fast = analysis.imax("I", dset_i)
                slow = analysis.brute_force_imax(build_codebook("I", tower), config.budget)
                report.record(abs(fast - slow) <= 1e-9, construction="I", reduced=fast, brute_force=slow)
            return report

        return {
            "gauss": gauss, "fourier": fourier, "trace": trace, "lemmaA": lemma_a, "lemmaB": lemma_b,
            "bent": bent, "PQ": pq, "distribution": distribution, "orthogonality": orthogonality,
            "restriction": restriction, "embedding": embedding, "decomposition": decomposition,
            "indicators": indicators, "oracle": oracle,
        }

    def verify(self, config, suite="all"):
        """
        Run verification suites on the configured tower.

        Suites that exceed the budget or do not apply are listed as skipped.

        Returns:
            tuple: (success, message, result dict)
        """
        names = SUITES + EXTRA_SUITES if suite == "all" else (suite,)
        try:
            config.validate()
            runners = self._suite_runners(config)
            unknown = [n for n in names if n not in runners]
            if unknown:
                raise ParameterError(f"unknown suite {unknown[0]!r}, expected one of "
                                     f"{('all',) + SUITES + EXTRA_SUITES}")
            params = config.params
            params.check_budget(config.budget, "q")
            with_q2 = params.q2 <= config.budget
            self.update_status(f"Building field tower {params.label()}...")
            tower = build_tower(params, config.budget, with_q2=with_q2)
        except CodebookError as e:
            return self._fail(e, "Verification")

        reports, skipped = {}, {}
        for i, name in enumerate(names):
            self.update_status(f"Running suite {name}...")
            try:
                report = runners[name](tower)
                reports[name] = report.to_dict()
                if not report.passed:
                    logger.error("Suite %s failed: %s", name, report.counterexample)
            except (BudgetExceededError, ParameterError) as e:
                skipped[name] = str(e)
                logger.warning("Suite %s skipped: %s", name, e)
            except IntegrityError as e:
                reports[name] = {"name": name, "passed": False, "checked": 0,
                                 "counterexample": {"error": str(e)}, "details": {}}
            self.update_progress(int(100 * (i + 1) / len(names)))

        passed = all(r["passed"] for r in reports.values())
        if suite != "all" and skipped:
            self.exit_code = ExitCode.USAGE
            passed = False
        else:
            self.exit_code = ExitCode.OK if passed else ExitCode.FAILED
        result = {"params": params.to_dict(), "passed": passed, "suites": reports, "skipped": skipped}
        message = (f"{sum(r['passed'] for r in reports.values())}/{len(reports)} suites passed"
                   + (f", skipped: {', '.join(skipped)}" if skipped else ""))
        self.update_status(message)
        return passed, message, result


def _level_or_none(tower, level):
    return tower.ctx_q2 if level == "q2" else tower.field(level)


def _require_q2(tower):
    if tower.ctx_q2 is None:
        raise BudgetExceededError("F_{q^2}", tower.params.q2, "configured")
