"""
Bundled example corpus

`corpus.json` lists named examples as command argument lists; arguments
starting with `@` name files inside the corpus directory. Each example's
machine trailer is compared with `golden/<name>.txt`.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from .config import get_config
from .errors import CorpusError, FormatError
from .report import Report, diff_trailers, parse_machine_trailer

logger = logging.getLogger(__name__)

MANIFEST = "corpus.json"
GOLDEN_DIR = "golden"

Runner = Callable[[Sequence[str]], Tuple[int, str]]


@dataclass
class CorpusExample:
    name: str
    args: List[str]
    exit_code: int = 0


@dataclass
class CorpusOutcome:
    example: CorpusExample
    passed: bool
    diffs: List[str] = field(default_factory=list)


@dataclass
class CorpusResult:
    report: Report
    outcomes: List[CorpusOutcome]

    @property
    def green(self) -> bool:
        return all(o.passed for o in self.outcomes)

    @property
    def failures(self) -> List[str]:
        return [o.example.name for o in self.outcomes if not o.passed]


def load_manifest(directory: str) -> List[CorpusExample]:
    path = os.path.join(directory, MANIFEST)
    if not os.path.isdir(directory):
        raise CorpusError("corpus directory does not exist", invariant="corpus-present",
                          witness=directory)
    if not os.path.exists(path):
        raise CorpusError("empty corpus: no manifest", invariant="corpus-present",
                          witness=directory)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (json.JSONDecodeError, IOError, UnicodeDecodeError) as e:
        raise FormatError(f"cannot read corpus manifest: {e}", None, path) from e
    entries = data.get("examples", []) if isinstance(data, dict) else None
    if entries is None:
        raise FormatError("manifest must be an object with an 'examples' list", None, path)
    if not entries:
        raise CorpusError("empty corpus: the manifest lists no examples",
                          invariant="corpus-present", witness=path)
    examples = []
    names = set()
    for entry in entries:
        try:
            example = CorpusExample(str(entry["name"]), [str(a) for a in entry["args"]],
                                    int(entry.get("exit", 0)))
        except (KeyError, TypeError, ValueError, AttributeError):
            raise FormatError(f"bad manifest entry {entry!r}", None, path) from None
        if example.name in names:
            raise FormatError(f"duplicate example name '{example.name}'", None, path)
        names.add(example.name)
        examples.append(example)
    return examples


def _resolve(args: Sequence[str], directory: str) -> List[str]:
    return [os.path.join(directory, a[1:]) if a.startswith('@') else a for a in args]


def _golden_path(directory: str, name: str) -> str:
    return os.path.join(directory, GOLDEN_DIR, f"{name}.txt")


def run_example(example: CorpusExample, directory: str, runner: Runner,
                update_golden: bool = False) -> CorpusOutcome:
    code, text = runner(_resolve(example.args, directory))
    if code != example.exit_code:
        return CorpusOutcome(example, False, [f"exit code {code}, expected {example.exit_code}"])
    if code != 0:
        return CorpusOutcome(example, True)
    golden = _golden_path(directory, example.name)
    if update_golden:
        os.makedirs(os.path.dirname(golden), exist_ok=True)
        with open(golden, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info(f"Wrote golden trailer for {example.name}")
        return CorpusOutcome(example, True)
    if not os.path.exists(golden):
        return CorpusOutcome(example, False, ["golden file is missing"])
    with open(golden, 'r', encoding='utf-8') as f:
        expected = parse_machine_trailer(f.read(), golden)
    diffs = diff_trailers(expected, parse_machine_trailer(text, example.name))
    return CorpusOutcome(example, not diffs, diffs)


def run_corpus(directory: Optional[str], runner: Runner,
               update_golden: bool = False) -> CorpusResult:
    """Run every example of the manifest and compare trailers with the golden files."""
    directory = directory or get_config().get("corpus.directory")
    examples = load_manifest(directory)
    outcomes = [run_example(e, directory, runner, update_golden) for e in examples]
    report = Report("corpus")
    for outcome in outcomes:
        status = "ok" if outcome.passed else "FAIL"
        report.say(f"{status:4} {outcome.example.name}")
        for diff in outcome.diffs:
            report.say(f"       {diff}")
    passed = sum(o.passed for o in outcomes)
    report.say(f"{passed}/{len(outcomes)} examples match")
    result = CorpusResult(report, outcomes)
    report.record("examples", len(outcomes))
    report.record("passed", passed)
    report.record("failed", result.failures)
    report.record("green", result.green)
    return result

