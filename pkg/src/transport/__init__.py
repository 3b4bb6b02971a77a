from .framing import HEADER_SIZE, MsgType, Phase, PHASES, ONLINE_PHASES, encode_frame, decode_header
from .stats import ChannelStats, FrameRecord
from .inproc_channel import InProcChannel
from .tcp_channel import TcpChannel
from .channel_factory import ChannelFactory
from .session import PartySession, create_session_pair, run_pair

__all__ = [
    'HEADER_SIZE',
    'MsgType',
    'Phase',
    'PHASES',
    'ONLINE_PHASES',
    'encode_frame',
    'decode_header',
    'ChannelStats',
    'FrameRecord',
    'InProcChannel',
    'TcpChannel',
    'ChannelFactory',
    'PartySession',
    'create_session_pair',
    'run_pair',
]
