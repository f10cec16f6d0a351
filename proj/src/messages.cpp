#include "uwsim/messages.hpp"

namespace uwsim {

std::string_view kind_name(MessageKind kind) noexcept {
    switch (kind) {
        case MessageKind::dio: return "DIO";
        case MessageKind::dao: return "DAO";
        case MessageKind::dao_ack: return "DAO-Ack";
        case MessageKind::dis: return "DIS";
        case MessageKind::ns: return "NS";
        case MessageKind::na: return "NA";
        case MessageKind::rs: return "RS";
        case MessageKind::ra: return "RA";
    }
    return "?";
}

bool is_neighbor_discovery(MessageKind kind) noexcept {
    return kind == MessageKind::ns || kind == MessageKind::na || kind == MessageKind::rs || kind == MessageKind::ra;
}

int default_size_bytes(MessageKind kind) noexcept {
    switch (kind) {
        case MessageKind::dio: return 50;
        case MessageKind::dao: return 4;
        case MessageKind::dao_ack: return 4;
        case MessageKind::dis: return 4;
        case MessageKind::ns: return 24;
        case MessageKind::na: return 24;
        case MessageKind::rs: return 8;
        case MessageKind::ra: return 16;
    }
    return 0;
}

}  // namespace uwsim
