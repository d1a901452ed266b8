__all__ = [
    'car', 'cli', 'config', 'dilation', 'dominance', 'format', 'instance', 'lab', 'linalg', 'nearness', 'oracles',
    'polynomial', 'renorm', 'schema', 'sequences', 'shifts',
]
