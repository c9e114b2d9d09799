import shutil
from functools import cached_property
from pathlib import Path

from jinja2 import Environment, PackageLoader, select_autoescape

__all__ = ['generate_summary_html', 'generate_summary_basic_html']

TEMPLATES = Path(__file__).parent / 'templates'

#: Badge status and tooltip of each density verdict.
VERDICTS = {
    'DENSE_EVIDENCE': ('passed', 'Coverage reached the dense threshold'),
    'NOWHERE_DENSE_EVIDENCE': ('passed', 'Coverage plateaued below the sparse threshold'),
    'INCONCLUSIVE': ('skipped', 'Neither threshold rule fired'),
}

#: Bootstrap colour of each stage status.
STATUS_CLASSES = {'passed': 'success', 'failed': 'danger', 'skipped': 'warning'}


class Results:
    """
    The stages of one run as template cards, most troubled first.

    Parameters
    ----------
    results : dict
        Stage name to stage summary, in execution order.
    title : str
        Page title.
    """
    def __init__(self, results, title="Hypertuple run"):
        self.title = title
        width = len(str(len(results)))
        cards = [Result(name, item, str(n).zfill(width))
                 for n, (name, item) in enumerate(results.items())]
        self.cards = sorted(cards, key=lambda card: card.indexes['status'], reverse=True)

    @cached_property
    def statistics(self):
        counts = dict(passed=0, failed=0, skipped=0, dense=0, nowhere_dense=0)
        for card in self.cards:
            if card.status in ('passed', 'failed', 'skipped'):
                counts[card.status] += 1
            if card.verdict == 'DENSE_EVIDENCE':
                counts['dense'] += 1
            elif card.verdict == 'NOWHERE_DENSE_EVIDENCE':
                counts['nowhere_dense'] += 1
        return counts

    @cached_property
    def has_coverage(self):
        """Whether any stage measured orbit coverage."""
        return any(card.coverage for card in self.cards)


class Result:
    """One stage card; ``full_name`` is dotted by command and sub-stage."""

    def __init__(self, name, item, id):
        self.full_name, self.id = name, id
        self.status = item.get('status', 'passed')
        self.status_msg = item.get('status_msg', '')
        self.verdict = item.get('verdict')
        self.expected = item.get('expected')
        self.coverage = item.get('coverage')
        self.digest = item.get('digest')
        self.hamming_distance = item.get('hamming_distance')
        self.residuals = item.get('residuals') or {}
        # nested results (vectors, tables) stay in the JSON report
        self.details = {key: value for key, value in (item.get('result') or {}).items()
                        if isinstance(value, (bool, int, float, str))}

    @property
    def module(self):
        return self.full_name.rpartition('.')[0]

    @property
    def name(self):
        return self.full_name.rpartition('.')[2]

    @property
    def classes(self):
        return [f'overall-{self.status}', f'verdict-{str(self.verdict).lower()}']

    @cached_property
    def indexes(self):
        """Sort keys as fixed width strings."""
        return {'status': f"{self._trouble:02d}", 'coverage': self._final_coverage}

    @property
    def _trouble(self):
        score = {'failed': 10, 'skipped': 1}.get(self.status, 0)
        if self.expected is not None and self.verdict != self.expected:
            score += 5
        if self.verdict == 'INCONCLUSIVE':
            score += 2
        return score

    @property
    def _final_coverage(self):
        final = self.coverage[-1] if self.coverage else 0.0
        return f"{final * 1000:04.0f}"

    @cached_property
    def coverage_str(self):
        if not self.coverage:
            return 'None'
        return ", ".join(f"{value:.3f}" for value in self.coverage)

    @property
    def badges(self):
        """Verdict and expectation badges shown next to the status."""
        if self.verdict is not None:
            yield {'status': verdict_status(self.verdict), 'label': self.verdict,
                   'tooltip': verdict_msg(self.verdict)}
        if self.expected is not None and self.expected != self.verdict:
            yield {'status': 'failed', 'label': f'expected {self.expected}',
                   'tooltip': 'Verdict differs from the expectation'}


def verdict_status(verdict):
    return VERDICTS.get(verdict, ('skipped', None))[0]


def status_class(status):
    """Bootstrap class of a status or of an ``overall-<status>`` class."""
    return STATUS_CLASSES.get(status.rpartition('-')[2], 'secondary')


def verdict_msg(verdict):
    return VERDICTS.get(verdict, (None, str(verdict)))[1]


def _write(template_name, results, html_file, report_file):
    env = Environment(loader=PackageLoader("hypertuple.summary.html"),
                      autoescape=select_autoescape())
    env.filters["status_class"] = status_class
    env.filters["verdict_msg"] = verdict_msg
    html = env.get_template(template_name).render(results=Results(results),
                                                  report_file=report_file)
    html_file.write_text(html + '\n')
    return html_file


def generate_summary_html(results, results_dir, report_file=None):
    """Write ``run_summary.html`` and its stylesheet into ``results_dir``.

    Parameters
    ----------
    results : dict
        Stage name to stage summary.
    results_dir : Path
    report_file : str, optional
        Name of the JSON run report in ``results_dir``, linked from the page.
    """
    results_dir = Path(results_dir)
    shutil.copy(TEMPLATES / 'styles.css', results_dir / 'styles.css')
    return _write('base.html', results, results_dir / 'run_summary.html', report_file)


def generate_summary_basic_html(results, results_dir, report_file=None):
    """Write the self-contained ``run_summary_basic.html`` into ``results_dir``."""
    results_dir = Path(results_dir)
    return _write('basic.html', results, results_dir / 'run_summary_basic.html', report_file)
