"""Shared case-study fixture: the published edit-alignment example."""

SRC = ("It is still early for parents to decide whether they can foster a "
       "new life that are not able to work and may suffer the pain in the "
       "entire life .")
HYP = ("It is still early for parents to decide whether they can foster a "
       "new life that is not able to work and may suffer pain throughout "
       "their life .")
REF = ("It is still early for parents to decide whether they can foster a "
       "new life that is not able to work and may suffer their entire "
       "life .")

# Edit sets as produced by the reference extraction tooling.
HYP_EDITS = [(16, 17, ("is",)), (24, 25, ()), (26, 27, ("throughout",)),
             (27, 29, ("their",))]
REF_EDITS = [(16, 17, ("is",)), (24, 27, ()), (27, 28, ("their",))]
