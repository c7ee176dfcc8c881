"""Source and target languages: types, terms, syntax and typechecking."""
from .types import *  # noqa: F401,F403
from .terms import *  # noqa: F401,F403
from .syntax import Program, parse_program, parse_term_text, pretty, pretty_program, show_type
from .typecheck import elaborate, typecheck
