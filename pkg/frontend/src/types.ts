/** Wire types mirroring the session service's JSON documents and schemas. */

export interface SlotSpec {
  type: 'number' | 'text' | 'enum'
  min?: number
  max?: number
  unit?: string
  max_len?: number
  options?: string[]
}

export interface ParamSpec {
  name: string
  slot: SlotSpec
  accepts_value_block: boolean
}

export interface CatalogKind {
  id: string
  category: string
  params: ParamSpec[]
  connects_as: 'statement' | 'value' | 'root'
  child_slots: string[]
}

export interface CatalogResponse {
  kinds: CatalogKind[]
  capability_text: string
}

export type ArgValue = number | string | BlockNode

export interface BlockNode {
  kind: string
  args: Record<string, ArgValue>
  children: Record<string, BlockNode[]>
}

export interface ProgramDoc {
  version: number
  seed: number
  root: BlockNode
}

export interface Violation {
  path: string
  code: string
  message: string
}

export interface ValidationResponse {
  ok: boolean
  report: Violation[]
}

export interface ChatTurn {
  author: 'user' | 'agent'
  text: string
  timestamp: number
}

export interface MilestoneFlag {
  kind: string
  complete: boolean
}

export interface NarrativeDoc {
  story_text: string
  revisions: string[]
  milestones: MilestoneFlag[]
  transcript: ChatTurn[]
}

export interface BlockRef {
  category: string
  kind_id: string
  param_overrides?: Record<string, number | string>
}

export interface HintDoc {
  text: string
  block_refs: BlockRef[]
  placement: { after_goal_index: number } | null
}

export interface GoalVerdict {
  status: 'unchecked' | 'valid' | 'flagged'
  unknown_refs?: string[]
}

export interface GoalDoc {
  snippet: string
  goal: string
  hints: HintDoc[]
  verdict: GoalVerdict
}

export interface GoalSetDoc {
  goals: GoalDoc[]
  source_revision: number
  generation: number
}

export interface RobotStateDoc {
  head: { pitch: number; roll: number; yaw: number }
  arms: { left: number; right: number }
  led: { r: number; g: number; b: number }
  face: string
  speaking: string | null
  audio: string | null
  clock: number
}

export interface StateTraceDoc {
  frames: RobotStateDoc[]
  final: RobotStateDoc
}

export interface ConnectionDoc {
  ip: string
  port: number
  state: 'connected' | 'disconnected'
  robot_name?: string | null
  last_error?: string | null
}

export interface CommandRecord {
  endpoint: string
  payload: Record<string, unknown>
  http_status: number
}

export interface DeploymentReportDoc {
  commands_sent: CommandRecord[]
  started: number
  finished: number
  outcome: { status: 'completed' | 'aborted'; at_index: number | null; reason: string | null }
}

export interface RunResult {
  mode: 'sim' | 'sim_and_robot'
  trace: StateTraceDoc
  report: DeploymentReportDoc | null
}

export interface SessionDoc {
  id: string
  phase: string
  narrative: NarrativeDoc
  goalsets: GoalSetDoc[]
  program: ProgramDoc | null
  connection: ConnectionDoc | null
  created_at: number
  updated_at: number
}

export interface ActivityEvent {
  session_id: string
  timestamp: number
  kind: string
  payload: Record<string, unknown>
}

export interface HelpResponse {
  milestone_kind: string
  suggestions: string[]
}
