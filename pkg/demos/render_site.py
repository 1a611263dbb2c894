"""
A browsable site from a synthetic corpus
========================================

Mine a few hundred posts and write the static pages to ``site/``.
"""

import sys
from collections import Counter

from apiscenarios.opinion import default_lexicon
from apiscenarios.pipeline import mine
from apiscenarios.render import render_html
from apiscenarios.synthetic import synthetic_corpus

out_dir = sys.argv[1] if len(sys.argv) > 1 else "site"
bench = synthetic_corpus(300, seed=1)
result = mine(bench.threads(), bench.catalog(), default_lexicon())
print(f"{bench.post_count} posts, {result.snippet_count} snippets, {len(result)} scenarios")

# Reactions per polarity give a quick sense of the opinion mix.
print(Counter(r.polarity for s in result for r in s.reactions))

paths = render_html(result.scenarios, out_dir)
print(f"wrote {len(paths)} files; open {out_dir}/index.html")
