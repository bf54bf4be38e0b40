#ifndef RELAYGAME_IO_H_
#define RELAYGAME_IO_H_

#include <string>
#include <vector>

#include "relaygame/co_solver.h"
#include "relaygame/config.h"
#include "relaygame/coop_solver.h"
#include "relaygame/po_solver.h"
#include "relaygame/reward_model.h"

namespace relaygame {

// Shortest text that reads back to the same double.
std::string format_number(double x);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& row(const std::vector<std::string>& cells);
  std::size_t rows() const { return rows_; }
  const std::string& text() const { return text_; }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

inline constexpr int kModelFormatVersion = 1;

Json model_to_json(const RewardModel& model);
RewardModel model_from_json(const Json& j);

Json co_solution_to_json(const CoNeppSolution& sol, const RewardModel& model);
Json po_solution_to_json(const PoNeppSolution& sol, const RewardModel& model,
                         const GameConfig& config);
Json coop_solution_to_json(const CoopSolution& sol, const RewardModel& model);

}  // namespace relaygame

#endif  // RELAYGAME_IO_H_
