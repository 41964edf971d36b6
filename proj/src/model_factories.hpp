#pragma once

#include <memory>

#include <nlohmann/json.hpp>

#include "rgs/model.hpp"

namespace rgs::detail {

std::shared_ptr<const Model> nb_from_json(const nlohmann::json& j);
std::shared_ptr<const Model> logistic_from_json(const nlohmann::json& j);
std::shared_ptr<const Model> tree_from_json(const nlohmann::json& j);
std::shared_ptr<const Model> forest_from_json(const nlohmann::json& j);
std::shared_ptr<const Model> adaboost_from_json(const nlohmann::json& j);
std::shared_ptr<const Model> gbtree_from_json(const nlohmann::json& j);
std::shared_ptr<const Model> gblinear_from_json(const nlohmann::json& j);
std::shared_ptr<const Model> svm_from_json(const nlohmann::json& j);
std::shared_ptr<const Model> knn_from_json(const nlohmann::json& j);
std::shared_ptr<const Model> dfnn_from_json(const nlohmann::json& j);

} // namespace rgs::detail
