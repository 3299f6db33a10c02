#include "iiotsim/harness/catalog.hpp"

#include "iiotsim/sim/error.hpp"

namespace iiotsim::harness {

const char* requirement_source_name(RequirementSource s) {
  return s == RequirementSource::Literature ? "literature" : "practice";
}

namespace {

constexpr RequirementSource kLit = RequirementSource::Literature;
constexpr RequirementSource kPrac = RequirementSource::Practice;

std::vector<RequirementEntry> build_catalog() {
  return {
      {1, "The system should provide functions that ensure system integrity", kLit, {6}},
      {2, "The system should provide functions that ensure the integrity of information", kLit,
       {6}},
      {3, "The system should be able to detect security breaches", kLit, {5}},
      {4, "The system should be able to guarantee data confidentiality", kLit, {3, 5}},
      {5, "The system should be able to restrict the data flow", kLit, {3}},
      {6, "The system should be able to support flexible data provision", kLit, {10}},
      {7, "The system should be able to compensate for failures of network components", kLit,
       {4}},
      {8, "The system should be able to perform network segmentation", kLit, {3}},
      {9, "The system should support functions for event recording", kLit, {11}},
      {10, "The system should be able to implement role-based access controls", kLit, {5}},
      {11, "The system should be able to implement role-based usage controls", kLit, {5}},
      {12, "The system should support functions for perimeter protection", kLit, {10}},
      {13, "The system should support remote access (e.g., via VPN) functions", kLit, {10}},
      {14,
       "The system should be able to implement different security policies for different "
       "network areas",
       kLit,
       {3, 5}},
      {15, "The system should be able to implement network protection measures", kLit,
       {3, 4, 5}},
      {16, "The system should provide high availability for operational technology (OT)", kLit,
       {1, 7}},
      {17,
       "The system should provide real-time communication for operational technology (OT) "
       "devices",
       kLit,
       {1}},
      {18, "The system should be able to scale and support as many devices as possible", kLit,
       {1, 4, 9}},
      {19, "The system should be able to implement QoS (quality of service) guidelines", kLit,
       {1}},
      {20, "The system should be able to increase network visibility", kLit, {10, 11}},
      {21, "The system should be able to identify and block data flows", kLit, {3, 5}},
      {22,
       "The system should offer the possibility of providing time-guaranteed communication "
       "with a defined pattern",
       kLit,
       {1}},
      {23, "The system should support edge computing for local process processing", kLit,
       {8, 9}},
      {24, "The system should be able to support deterministic cyclic data communication", kLit,
       {1}},
      {25,
       "The system should be able to separate time-critical from non-time-critical "
       "communication",
       kLit,
       {1, 2}},
      {26, "The system should be able to support different communication standards", kLit, {11}},
      {27,
       "The system should support functions that connect new field devices to the network "
       "without human intervention",
       kPrac,
       {8, 9}},
      {28, "The system should be able to connect to an edge device", kPrac, {9}},
      {29,
       "The system should be able to establish communication between an edge device and "
       "services outside the same zone",
       kPrac,
       {3, 5, 10}},
      {30,
       "The system should be able to dynamically provide different users (humans, machines, "
       "services) with direct access to the camera",
       kPrac,
       {1, 5}},
      {31, "The system should be able to transmit camera data in real time", kPrac, {1}},
      {32,
       "The system should be able to forward image data without hindering time-critical "
       "communication",
       kPrac,
       {1, 2}},
      {33, "The system should be able to allow a dynamic configuration of the camera", kPrac,
       {9}},
      {34,
       "The system should be able to provide sufficient data throughput for processing large "
       "amounts of data",
       kPrac,
       {1}},
      {35, "The system should be able to provide direct access to machine components", kPrac,
       {1, 5}},
      {36, "The system should be able to provide role-based access to different network areas",
       kPrac, {5}},
      {37,
       "The system should be able to maintain a communication link between the two end points",
       kPrac,
       {1, 7}},
      {38, "The system should be able to implement safety relevant guidelines", kPrac, {3}},
      {39,
       "The system should provide sufficient data throughput for processing large amounts of "
       "data",
       kPrac,
       {1}},
      {40, "The system should be able to dynamically adapt the communication link", kPrac, {9}},
      {41, "The system should be able to support M2M communication", kPrac, {9, 11}},
      {42,
       "The system should provide functions that allow the location of devices in different "
       "network areas",
       kPrac,
       {3, 9}},
      {43, "The system should be able to allow communication over different network transitions",
       kPrac, {3}},
      {44,
       "The system should be able to establish an ad-hoc communication link between production "
       "machine and autonomous transport system",
       kPrac,
       {9}},
  };
}

} // namespace

const std::vector<RequirementEntry>& catalog() {
  static const std::vector<RequirementEntry> entries = build_catalog();
  return entries;
}

const std::string& design_requirement_name(int dr) {
  static const std::vector<std::string> names = {
      "",          "Quality of Service", "Non-inferring flows", "Network segmentation",
      "Reliability", "Confidentiality",  "Integrity",           "Availability",
      "Retrofit",  "Reconfigurability",  "Accessibility",       "Adaptability",
  };
  if (dr < 1 || dr > 11) throw Error(Errc::InvalidRange, "DR index " + std::to_string(dr));
  return names[static_cast<std::size_t>(dr)];
}

} // namespace iiotsim::harness
