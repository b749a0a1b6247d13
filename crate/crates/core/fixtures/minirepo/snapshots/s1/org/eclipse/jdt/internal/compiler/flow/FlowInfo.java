package org.eclipse.jdt.internal.compiler.flow;

import org.eclipse.jdt.internal.compiler.lookup.FieldBinding;
import org.eclipse.jdt.internal.compiler.lookup.LocalVariableBinding;

/**
 * Definite assignment and reachability information computed by the flow
 * analysis.
 */
public abstract class FlowInfo {

	public int tagBits;
	public final static int REACHABLE = 0;
	public final static int UNREACHABLE = 1;

	// mark a field as definitely assigned on every path
	public void markAsDefinitelyAssigned(FieldBinding field) {
		if (this != DEAD_END) {
			markAsDefinitelyAssigned(field.id);
		}
	}

	/* Answer whether the local variable is definitely assigned. */
	public boolean isDefinitelyAssigned(LocalVariableBinding local) {
		if ((local.type.tagBits & TagBits.IsBaseType) == 0) {
			return isDefinitelyAssigned(local.id + this.maxFieldCount);
		}
		return false;
	}

	public UnconditionalFlowInfo unconditionalInits() {
		UnconditionalFlowInfo copy = new UnconditionalFlowInfo();
		copy.definiteInits = this.definiteInits;
		copy.potentialInits = this.potentialInits;
		return copy;
	}
}
