""" Toy translation adapters speaking the line-in/line-out protocol. Run them
with ``{python} -m stpipe.adapters.<name>``.
"""
