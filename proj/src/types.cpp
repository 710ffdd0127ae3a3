#include "audit/types.hpp"

namespace audit {

std::string_view to_string(DatasetId id) {
  switch (id) {
    case DatasetId::pubmed_central:
      return "pubmed_central";
    case DatasetId::books3:
      return "books3";
    case DatasetId::arxiv:
      return "arxiv";
    case DatasetId::github:
      return "github";
    case DatasetId::freelaw:
      return "freelaw";
  }
  return "unknown";
}

std::optional<DatasetId> dataset_from_string(std::string_view name) {
  for (DatasetId id : kAllDatasets) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

}  // namespace audit
