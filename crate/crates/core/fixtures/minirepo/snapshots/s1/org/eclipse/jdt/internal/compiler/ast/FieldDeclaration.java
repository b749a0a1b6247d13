package org.eclipse.jdt.internal.compiler.ast;

import org.eclipse.jdt.internal.compiler.flow.FlowContext;
import org.eclipse.jdt.internal.compiler.flow.FlowInfo;
import org.eclipse.jdt.internal.compiler.lookup.MethodScope;

/** A field declaration, possibly with an initialization expression. */
public class FieldDeclaration extends AbstractVariableDeclaration {

	public FieldBinding binding;
	public int endPart1Position;
	public int endPart2Position;

	public FlowInfo analyseCode(MethodScope initializationScope, FlowContext flowContext, FlowInfo flowInfo) {
		if (this.binding != null && !this.binding.isUsed()) {
			initializationScope.problemReporter().unusedPrivateField(this);
		}
		// the initialization assigns the field definitely
		if (this.initialization != null) {
			flowInfo = this.initialization.analyseCode(initializationScope, flowContext, flowInfo).unconditionalInits();
			flowInfo.markAsDefinitelyAssigned(this.binding);
		}
		return flowInfo;
	}

	public boolean isStatic() {
		if (this.binding != null) return this.binding.isStatic();
		return (this.modifiers & ClassFileConstants.AccStatic) != 0;
	}

	/* Resolve the type of the field and check the initialization against it. */
	public void resolve(MethodScope initializationScope) {
		if (this.binding == null || !this.binding.isValidBinding()) return;
		TypeBinding fieldType = this.binding.type;
		initializationScope.initializedField = this.binding;
		initializationScope.lastVisibleFieldID = this.binding.id;
		if (this.initialization != null) {
			TypeBinding initializationType = this.initialization.resolveType(initializationScope);
			this.initialization.computeConversion(initializationScope, fieldType, initializationType);
		}
	}
}
