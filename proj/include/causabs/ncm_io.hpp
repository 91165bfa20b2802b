#pragma once

#include "causabs/io.hpp"
#include "causabs/ncm.hpp"

namespace causabs {

// Checkpoint: {"graph", "domains", "cliques", "clique_logits", "response_logits",
// "config"}. response_logits[v] is row-major with rows ordered by parent values
// (graph node order, first most significant) then the values of the cliques
// containing v. -inf logits are written as null.
json ncm_to_json(const Ncm& m, const TrainConfig& cfg);
Ncm ncm_from_json(const json& j, TrainConfig* cfg = nullptr);

json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const json& j, TrainConfig base = {});

json fit_result_to_json(const FitResult& r);

} // namespace causabs
