"""
Mining one thread by hand
=========================

A single answer carries two snippets, one for Gson and one for org.json,
followed by six comments.  We walk the pipeline stage by stage and look at
what each one decides.
"""

from apiscenarios.opinion import default_lexicon
from apiscenarios.pipeline import link_thread, mine
from apiscenarios.config import Config
from apiscenarios.synthetic import motivating_catalog, motivating_thread

thread = motivating_thread()
catalog = motivating_catalog()
print(thread.title)

# Parse the snippets and link them by proximity.  Each decision keeps the
# trace of the filters that narrowed the candidate list.
for state in link_thread(thread, catalog, Config()):
    d = state.decision
    print(state.snippet_id, sorted(state.parsed.types_used), "->", d.d_api, f"({d.bucket})")
    for step in d.filter_trace:
        print("   ", step.name, dict(step.scores))

# The full run adds task descriptions and reactions.
result = mine([thread], catalog, default_lexicon())
for scenario in result:
    print()
    print(scenario.snippet_id, scenario.api.d_api)
    print("  problem: ", [s.text for s in scenario.description.problem_summary])
    print("  solution:", [s.text for s in scenario.description.solution_summary])
    for r in scenario.reactions:
        print(f"  {r.comment_id} {r.polarity:8} {r.basis:13} {r.sentence.text}")

# C5 is a neutral thank-you and C6 praises a third library, so neither
# shows up as a reaction to either snippet.
