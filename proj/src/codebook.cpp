#include "lglat/codebook.hpp"

#include "json.hpp"

namespace lglat {

std::string codebook_inspect_json(const Codebook<float>& book) {
  nlohmann::json j;
  j["K"] = book.K();
  j["lambda"] = book.lambda;
  j["counts"] = book.c;
  std::vector<float> norms;
  norms.reserve(static_cast<size_t>(book.K()));
  for (int row = 0; row < book.K(); ++row) norms.push_back(book.q.row(row).norm());
  j["vector_norms"] = norms;
  return j.dump(2);
}

}  // namespace lglat
