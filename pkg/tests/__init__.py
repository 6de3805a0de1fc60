# treesums tests
