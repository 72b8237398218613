"""Run the Picard number one search and group the accepted varieties
into isomorphism classes.

Run with:  python demos/search.py
"""

from arrvar.classifier import SearchConfig, dedupe, normal_form_key, reference_rings, run_search

res = run_search(SearchConfig(picard=1))
print(len(res.analyzed), "points analysed,", len(res.accepted), "accepted")

groups = dedupe(res.accepted)
known = {normal_form_key(r): name for name, r in reference_rings().items()}
for rep in groups.representatives:
    label = known.get(rep.key, "")
    print(f"  {rep.case} {rep.relation_type} {rep.params}  {label}")
