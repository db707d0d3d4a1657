"""proofdesk: desk-scale proof assistance.

Verify articles written in a small formal language, turn every `by`
justification into a self-contained first-order TPTP problem, decide the
problems with a built-in saturation prover or external systems under strict
resource limits, and suggest likely-useful premises from a trained
naive-Bayes model.
"""

__version__ = "0.1.0"
