from pathlib import Path
import textwrap

from rankshift.helpers import print_warning

try:
    import tomllib
except ImportError:
    import tomli as tomllib


class RankshiftError(Exception):
    """
    Base class of all errors raised while scoring, generating or evaluating.

    Every error has an issue id (a dash separated name that can be passed
    to --explain) and optionally the location in the input it refers to.
    """

    issue = 'rankshift-error'
    exit_code = 3

    def __init__(self, detail='', filename=None, line=None):
        super().__init__(detail)
        self.detail = detail
        self.filename = filename
        self.line = line

    def locate(self, filename=None, line=None):
        """Attach an input location unless one is already known."""
        if self.filename is None:
            self.filename = filename
        if self.line is None:
            self.line = line
        return self

    def format(self):
        location = Path(self.filename).name if self.filename else '(none)'
        if self.line is not None:
            location += f':{self.line}'
        detail = f' {self.detail}' if self.detail else ''
        return f'{location}: E: {self.issue}{detail}'

    def __str__(self):
        return self.format()


class ConfigError(RankshiftError):
    issue = 'invalid-config'
    exit_code = 4


class MalformedLine(RankshiftError):
    issue = 'malformed-line'


class OutOfOrderTimestamp(RankshiftError):
    issue = 'out-of-order-timestamp'


class UnknownNode(RankshiftError):
    issue = 'unknown-node'


class DeleteNonexistentEdge(RankshiftError):
    issue = 'delete-nonexistent-edge'


class NonConvergence(RankshiftError):
    issue = 'non-convergence'


class DimensionMismatch(RankshiftError):
    issue = 'dimension-mismatch'


class CliqueLargerThanGraph(RankshiftError):
    issue = 'clique-larger-than-graph'


class EvaluationError(RankshiftError):
    issue = 'evaluation-error'
    exit_code = 5


class KTooLarge(EvaluationError):
    issue = 'k-too-large'


class EmptyGroundTruth(EvaluationError):
    issue = 'empty-ground-truth'


class EmptyInput(EvaluationError):
    issue = 'empty-input'


class MisalignedWindows(EvaluationError):
    issue = 'misaligned-windows'


def load_descriptions():
    """
    Load issue description texts from toml files.

    Detailed description for every issue is stored in
    descriptions/<module>.toml file.

    Returns:
        A dictionary mapping issue ids to their descriptions.
    """
    descriptions = {}
    descr_folder = Path(__file__).parent / 'descriptions'
    try:
        for description_file in sorted(descr_folder.glob('*.toml')):
            with open(description_file, 'rb') as f:
                descriptions.update(tomllib.load(f))
    except tomllib.TOMLDecodeError as terr:
        print_warning(f'(none): W: unable to parse description files: {terr}')
    return descriptions


def get_description(issue, descriptions=None):
    """
    Get the wrapped description of an issue id, empty if unknown.
    """
    if descriptions is None:
        descriptions = load_descriptions()
    if issue not in descriptions:
        return ''
    # we need 2 enters at the end for whitespace purposes
    return textwrap.fill(descriptions[issue], 78, break_on_hyphens=False) + '\n\n'
