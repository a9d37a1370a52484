#include "rrrt/congestion/buffer.hpp"

#include <cmath>

#include "rrrt/error.hpp"

namespace rrrt::congestion {

EnqueueResult NodeBuffer::on_enqueue() {
  if (occupancy < capacity) {
    ++occupancy;
    return EnqueueResult::Queued;
  }
  ++drops;
  return EnqueueResult::Dropped;
}

void NodeBuffer::on_dequeue() {
  ensure(occupancy > 0, "dequeue from empty buffer");
  --occupancy;
}

bool congestion_flag(const NodeBuffer& buf) {
  const std::int64_t occ = buf.occupancy;
  const std::int64_t growth = occ - static_cast<std::int64_t>(buf.prev_occupancy);
  return occ + growth > static_cast<std::int64_t>(buf.capacity);
}

bool NodeBuffer::sample_epoch() {
  const bool flag = congestion_flag(*this);
  prev_occupancy = occupancy;
  return flag;
}

void EpochSampler::advance(NodeBuffer& buf, double now) {
  const auto current = static_cast<std::int64_t>(std::floor(now / epoch_));
  if (current <= last_epoch_) return;
  flag_ = buf.sample_epoch();
  // Later boundaries saw the same occupancy.
  if (current - last_epoch_ > 1) flag_ = buf.sample_epoch();
  last_epoch_ = current;
}

}  // namespace rrrt::congestion
