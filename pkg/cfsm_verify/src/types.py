"""Type definitions."""

from typing import Optional, Tuple

# Message symbols, node, channel and local state names are plain strings.
# Local state names are namespaced per node: node "0"'s "03" and node "1"'s
# "03" are distinct.
Symbol = str
NodeId = str
ChannelId = str
StateName = str

"""A finite word over a channel alphabet, e.g. `("D", "R")`."""
Word = Tuple[Symbol, ...]

"""One local state per node, in protocol node declaration order."""
CompositeState = Tuple[StateName, ...]

"""One word per channel, in protocol channel declaration order."""
Contents = Tuple[Word, ...]

"""A length cap; `None` means unbounded."""
LengthCap = Optional[int]
