"""List the equidistributed unit subsets mod 17 and how each one splits into chains.

Sets that admit no split into full-length blocks are split into chains of
half the order of 2, which close up because 2^4 = -1 (mod 17).
"""
from equisums import NoDecomposition, ResidueMultiset, brute_force_census, build_context, decompose

ctx = build_context(17)
census = brute_force_census(ctx)
print(f"q=17, r={ctx.r}: {census.count} equidistributed unit subsets")
for s in census.sets:
    A = ResidueMultiset.of(s, 17)
    try:
        dec = decompose(A, ctx)
        kind = "full"
    except NoDecomposition:
        dec = decompose(A, ctx, chain_length=ctx.r // 2)
        kind = "half"
    print(f"{kind:>4}  {str(A):<40} " + " ".join(str(b) for b in dec.blocks))
