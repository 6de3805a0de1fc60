# treesums
# Exact generating functions for genus-zero moduli and configuration spaces
