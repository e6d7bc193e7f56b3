"""Applications of variational resummation: ``epsilon``, ``bec``, ``hydrogen`` and ``membrane``."""
