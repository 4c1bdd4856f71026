#pragma once

// JSON persistence for owner states and metrics records.

#include <json.hpp>

#include "pasafl/core_types.hpp"

namespace pasafl {

inline void to_json(nlohmann::json& j, const DataOwnerState& s) {
  j = {{"id", s.id},
       {"reputation_r", s.reputation},
       {"pending_q", s.pending},
       {"urgency_Q", s.urgency},
       {"avg_demand_kappa_bar", s.avg_demand},
       {"availability_rho", s.availability},
       {"unit_cost_c", s.unit_cost},
       {"reserve_price_p_min", s.reserve_price},
       {"rep_threshold_r_min", s.rep_threshold},
       {"theta_max", s.theta_max},
       {"s_max", s.s_max},
       {"kappa_max", s.kappa_max},
       {"work_capacity", s.work_capacity},
       {"alignment_epsilon", s.alignment},
       {"positive_ratings_Mp", s.positive_ratings},
       {"current_price_p", s.price},
       {"data_size", s.data_size}};
}

inline void from_json(const nlohmann::json& j, DataOwnerState& s) {
  j.at("id").get_to(s.id);
  j.at("reputation_r").get_to(s.reputation);
  j.at("pending_q").get_to(s.pending);
  j.at("urgency_Q").get_to(s.urgency);
  j.at("avg_demand_kappa_bar").get_to(s.avg_demand);
  j.at("availability_rho").get_to(s.availability);
  j.at("unit_cost_c").get_to(s.unit_cost);
  j.at("reserve_price_p_min").get_to(s.reserve_price);
  j.at("rep_threshold_r_min").get_to(s.rep_threshold);
  j.at("theta_max").get_to(s.theta_max);
  j.at("s_max").get_to(s.s_max);
  j.at("kappa_max").get_to(s.kappa_max);
  j.at("work_capacity").get_to(s.work_capacity);
  j.at("alignment_epsilon").get_to(s.alignment);
  j.at("positive_ratings_Mp").get_to(s.positive_ratings);
  j.at("current_price_p").get_to(s.price);
  j.at("data_size").get_to(s.data_size);
}

inline void to_json(nlohmann::json& j, const MetricsRecord& r) {
  j = {{"step", r.step},         {"do_id", r.do_id},
       {"utility_u", r.utility}, {"pending_q", r.pending},
       {"urgency_Q", r.urgency}, {"accepted_kappa", r.accepted},
       {"completed_theta", r.completed}, {"subdelegated_s", r.subdelegated},
       {"price_p", r.price},     {"reputation_r", r.reputation}};
}

inline void from_json(const nlohmann::json& j, MetricsRecord& r) {
  j.at("step").get_to(r.step);
  j.at("do_id").get_to(r.do_id);
  j.at("utility_u").get_to(r.utility);
  j.at("pending_q").get_to(r.pending);
  j.at("urgency_Q").get_to(r.urgency);
  j.at("accepted_kappa").get_to(r.accepted);
  j.at("completed_theta").get_to(r.completed);
  j.at("subdelegated_s").get_to(r.subdelegated);
  j.at("price_p").get_to(r.price);
  j.at("reputation_r").get_to(r.reputation);
}

}  // namespace pasafl
