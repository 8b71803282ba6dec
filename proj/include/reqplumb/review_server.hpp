#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "reqplumb/config.hpp"
#include "reqplumb/workspace.hpp"

namespace httplib {
class Server;
}

namespace reqplumb {

// HTTP review API over a workspace. The manifest is re-read on every request
// so a pipeline running in another process is picked up.
class ReviewServer {
 public:
  ReviewServer(std::filesystem::path workspace, std::filesystem::path curation_dir,
               std::filesystem::path static_dir = {});
  ~ReviewServer();

  // Binds an ephemeral port and returns it; serve with listen_after_bind().
  int bind_any(const std::string& host = "127.0.0.1");
  bool listen_after_bind();
  bool listen(const std::string& host, int port);
  void stop();
  void wait_until_ready() const;

 private:
  void routes();

  std::filesystem::path workspace_;
  CurationStore store_;
  std::filesystem::path static_dir_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace reqplumb
