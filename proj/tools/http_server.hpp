#pragma once

#include <string>

namespace httplib {
class Server;
}

namespace ppdm {

class Session;

/// POST /<op> with a JSON body for every session op; GET also works for
/// list_faces, export_mesh and health. Errors answer 400 (malformed) or 422.
void register_routes(httplib::Server& server, Session& session);

/// Blocks serving one session on host:port.
int serve(const std::string& host, int port);

}  // namespace ppdm
