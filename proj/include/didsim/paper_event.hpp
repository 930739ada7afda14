// paper_event.hpp — one submitted manuscript, the unit that flagging rules
// operate on. Produced either by expanding a simulated panel or by ingesting
// a paper-level CSV.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "didsim/rng.hpp"

namespace didsim {

struct PaperEvent {
  std::string paper_id;
  std::uint64_t paper_key = 0;  // fnv1a64(paper_id); drives per-paper flag draws
  int author = -1;              // dense author index into the panel
  int month = -1;               // 0-based month index within the panel window
  std::vector<std::string> tokens;  // lowercased words; empty unless provided
  bool has_tokens = false;
  bool flagged = false;

  static PaperEvent make(std::string id, int author, int month) {
    PaperEvent e;
    e.paper_key = fnv1a64(id);
    e.paper_id = std::move(id);
    e.author = author;
    e.month = month;
    return e;
  }
};

}  // namespace didsim
